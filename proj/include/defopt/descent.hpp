#ifndef DEFOPT_DESCENT_HPP
#define DEFOPT_DESCENT_HPP

#include <utility>
#include <vector>

#include "defopt/problem.hpp"

namespace defopt {

struct DescentOptions {
  double grad_tol = 1e-6;        // stop when ||(U,V)|| <= grad_tol
  int max_iters = 5000;
  bool safeguard = true;         // backtrack when the step fails to decrease cost
  double backtrack_factor = 0.5;
  double min_step = 1e-12;

  void validate() const;
};

enum class StopReason { converged, iteration_limit, degenerate_direction };

struct DescentState {
  int iter = 0;
  ScalarField u, v, w;
  double cost = 0.0;
  double grad_norm_sq = 0.0;  // int(|grad U|^2 + V^2)
  double eps = 0.0;           // last accepted step size
  double residual_h1 = 0.0;   // sqrt(w'Kw)
  StopReason stop = StopReason::converged;
};

struct IterationRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double eps = 0.0;
  double residual_h1 = 0.0;
};

using RunReport = std::vector<IterationRecord>;

// Steepest-descent direction in u: solves
//   K U = lambda*K w - h^2 (u - ubar) + lambda*h^2 phi'(u).w.
ScalarField direction_u(const ScalarField& u, const ScalarField& w,
                        const ProblemSpec& spec, const SpdMatrix& K);

// V = -(mu v + lambda w), pointwise.
ScalarField direction_v(const ScalarField& v, const ScalarField& w,
                        const ProblemSpec& spec);

// First-order defect perturbation: K W = h^2 (V - phi'(u).U) - K U.
ScalarField perturbation_defect(const ScalarField& u, const ScalarField& U,
                                const ScalarField& V, const ProblemSpec& spec,
                                const SpdMatrix& K);

class DegenerateDirectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadratic-model step length
//   eps = -int[(u-ubar)U + mu vV + lambda grad w.grad W]
//        / int[U^2 + mu V^2 + lambda |grad W|^2],
// exact line minimizer when phi is affine.
double step_size(const ScalarField& u, const ScalarField& v, const ScalarField& w,
                 const ScalarField& U, const ScalarField& V, const ScalarField& W,
                 const ProblemSpec& spec, const SpdMatrix& K);

struct DescentResult {
  DescentState state;
  RunReport report;
};

DescentResult run_descent(const ProblemSpec& spec, const DescentOptions& opts,
                          const std::pair<ScalarField, ScalarField>* init = nullptr);

}  // namespace defopt

#endif
