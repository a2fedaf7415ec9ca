#ifndef DEFOPT_PROBLEM_HPP
#define DEFOPT_PROBLEM_HPP

#include <optional>

#include "defopt/cg.hpp"
#include "defopt/grid.hpp"
#include "defopt/nonlinearity.hpp"
#include "defopt/spd.hpp"

namespace defopt {

// Full problem definition: target, reaction term, weights, and optional
// pointwise constraints u <= 0, v_minus <= v <= v_plus.
struct ProblemSpec {
  Grid grid;
  ScalarField target;          // ubar
  Nonlinearity phi = Nonlinearity::zero();
  double mu = 0.0;             // Tikhonov weight (ignored when constrained)
  double lambda = 1.0;         // defect penalty weight, > 0
  bool constrained = false;
  std::optional<ScalarField> v_lower;
  std::optional<ScalarField> v_upper;
  CgOptions linear_solver;

  void validate() const;  // throws std::invalid_argument on bad data
};

// Residual norms of the first-order optimality system
//   u - lambda*phi'(u) w = ubar - lambda*Lap(w),   mu*v + lambda*w = 0.
struct KktResidual {
  double stationarity_u = 0.0;  // L2 norm
  double stationarity_v = 0.0;  // L2 norm
};

// Defect w of the pair (u,v): the unique solution of
//   K w = h^2 (v - phi(u)) - K u.
ScalarField solve_defect(const ScalarField& u, const ScalarField& v,
                         const ProblemSpec& spec, const SpdMatrix& K);

// Matrix-free variant used inside the iteration loops.
ScalarField solve_defect(const ScalarField& u, const ScalarField& v,
                         const ProblemSpec& spec);

// 1/2|u-ubar|^2 + mu/2|v|^2 + lambda/2 w'Kw; the constrained variant
// carries no mu-term. w must be the defect of (u,v).
double cost(const ScalarField& u, const ScalarField& v, const ScalarField& w,
            const ProblemSpec& spec, const SpdMatrix& K);

KktResidual kkt_residual(const ScalarField& u, const ScalarField& v,
                         const ScalarField& w, const ProblemSpec& spec,
                         const SpdMatrix& K);

}  // namespace defopt

#endif
