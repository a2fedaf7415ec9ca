#ifndef DEFOPT_STUDY_HPP
#define DEFOPT_STUDY_HPP

#include <optional>
#include <vector>

#include "defopt/descent.hpp"
#include "defopt/problem.hpp"

namespace defopt {

// Exact-state-law optimum of the classical problem
//   min 1/2|u-ubar|^2 + mu/2|v|^2  s.t.  -Lap(u) + phi(u) = v,
// for affine phi(u) = c0 + c1 u with c1 >= 0 and mu > 0. Discrete
// first-order system with A = K + c1 h^2 I:
//   state    A u = h^2 (v - c0)
//   adjoint  A p = -h^2 (u - ubar)
//   gradient mu v - p = 0,
// eliminated to the single SPD system (A^2 + h^4/mu) u = h^4/mu ubar - c0 h^2 A.1.
struct ClassicalSolution {
  ScalarField u, v, p;
};

ClassicalSolution classical_kkt_solve(const ProblemSpec& spec);

struct ContinuationEntry {
  double lambda = 0.0;
  ScalarField u, v;
  double cost = 0.0;
  double residual_h1 = 0.0;       // sqrt(w'Kw)
  double weighted_residual = 0.0; // lambda*(w'Kw + h^2|w|^2)
  std::optional<double> dist_u_oracle;  // L2 distances to the classical optimum
  std::optional<double> dist_v_oracle;
  bool converged = true;
};

struct ContinuationResult {
  std::vector<double> lambdas;
  std::vector<ContinuationEntry> entries;
  std::optional<ClassicalSolution> oracle;
};

// Solves the sweep of problems with increasing lambda, warm-starting
// each run from the previous optimum; oracle distances are filled in
// when classical_kkt_solve applies (affine phi, mu > 0, unconstrained).
ContinuationResult run_continuation(const ProblemSpec& spec,
                                    const std::vector<double>& lambdas,
                                    const DescentOptions& opts);

}  // namespace defopt

#endif
