#ifndef DEFOPT_BARRIER_HPP
#define DEFOPT_BARRIER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "defopt/descent.hpp"
#include "defopt/problem.hpp"

namespace defopt {

// Exponent clamp for every exp() in the barrier terms; e^30 already
// saturates any gradient balance at double precision.
inline constexpr double kBarrierExpClamp = 30.0;

double clamped_exp(double x);

// Pointwise multiplier fields, strictly positive throughout.
struct BarrierMultipliers {
  ScalarField a;        // state constraint u <= 0
  ScalarField b_lower;  // v >= v_minus
  ScalarField b_upper;  // v <= v_plus

  static BarrierMultipliers constant(const Grid& g, double value);
};

// Sup norms and per-node fields of the three certificate products
// a.u, b-.(v_minus - v), b+.(v - v_plus).
struct CertificateReport {
  double p_state = 0.0;  // sup |a.u|
  double p_lower = 0.0;
  double p_upper = 0.0;
  double p_state_pos = 0.0;  // sup of positive part
  double p_lower_pos = 0.0;
  double p_upper_pos = 0.0;
  ScalarField state_product;
  ScalarField lower_product;
  ScalarField upper_product;

  double max_abs() const;
  double max_pos() const;
};

CertificateReport certificates(const BarrierMultipliers& mult, const ScalarField& u,
                               const ScalarField& v, const ProblemSpec& spec);

// Constrained cost augmented with the exponential barrier terms:
//   1/2|u-ubar|^2 + lambda/2 w'Kw
//   + int[e^{a u} + e^{b-(v_minus-v)} + e^{b+(v-v_plus)}].
double barrier_cost(const ScalarField& u, const ScalarField& v, const ScalarField& w,
                    const BarrierMultipliers& mult, const ProblemSpec& spec,
                    const SpdMatrix& K);

// Steepest-descent directions of the barrier cost:
//   K U = lambda*K w - h^2(u - ubar) - h^2 a.e^{a u}
//   V   = -(lambda w - b-.e^{b-(v_minus-v)} + b+.e^{b+(v-v_plus)}).
std::pair<ScalarField, ScalarField> barrier_directions(
    const ScalarField& u, const ScalarField& v, const ScalarField& w,
    const BarrierMultipliers& mult, const ProblemSpec& spec, const SpdMatrix& K);

// Armijo-safeguarded descent on the barrier cost for fixed multipliers.
DescentState inner_solve(const ProblemSpec& spec, const BarrierMultipliers& mult,
                         const DescentOptions& opts,
                         const std::pair<ScalarField, ScalarField>& init);

// Multiplicative update a <- a e^{a u}, b^- <- b^- e^{b^-(v_minus-v)},
// b^+ <- b^+ e^{b^+(v-v_plus)}; strictly positive by construction.
BarrierMultipliers update_multipliers(const BarrierMultipliers& mult,
                                      const ScalarField& u, const ScalarField& v,
                                      const ProblemSpec& spec);

struct OuterRecord {
  int outer_iter = 0;
  int inner_iters = 0;
  double cost = 0.0;           // constrained cost without barrier terms
  double cert_state = 0.0;
  double cert_lower = 0.0;
  double cert_upper = 0.0;
  double max_violation_u = 0.0;  // sup of positive part of u
  double max_violation_v = 0.0;  // sup of bound violation of v
};

struct BarrierResult {
  DescentState state;
  BarrierMultipliers multipliers;
  CertificateReport certificates;
  std::vector<OuterRecord> outer_log;
  bool converged = false;
};

using OuterProgress = std::function<void(const OuterRecord&)>;

BarrierResult run_barrier(const ProblemSpec& spec, const DescentOptions& opts,
                          double outer_tol, int max_outer,
                          const BarrierMultipliers* init_mult = nullptr,
                          const OuterProgress& progress = nullptr);

}  // namespace defopt

#endif
