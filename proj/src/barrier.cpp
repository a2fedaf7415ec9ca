#include "defopt/barrier.hpp"

#include <algorithm>
#include <cmath>

#include "defopt/kernels.hpp"

namespace defopt {

double clamped_exp(double x) {
  return std::exp(std::clamp(x, -kBarrierExpClamp, kBarrierExpClamp));
}

BarrierMultipliers BarrierMultipliers::constant(const Grid& g, double value) {
  if (!(value > 0.0))
    throw std::invalid_argument("barrier multipliers must be strictly positive");
  return {ScalarField(g, value), ScalarField(g, value), ScalarField(g, value)};
}

double CertificateReport::max_abs() const {
  return std::max({p_state, p_lower, p_upper});
}

double CertificateReport::max_pos() const {
  return std::max({p_state_pos, p_lower_pos, p_upper_pos});
}

CertificateReport certificates(const BarrierMultipliers& mult, const ScalarField& u,
                               const ScalarField& v, const ProblemSpec& spec) {
  const Grid& g = spec.grid;
  CertificateReport rep;
  rep.state_product = ScalarField(g);
  rep.lower_product = ScalarField(g);
  rep.upper_product = ScalarField(g);
  const ScalarField& vl = *spec.v_lower;
  const ScalarField& vu = *spec.v_upper;
  for (int p = 0; p < g.m; ++p) {
    const double ps = mult.a[p] * u[p];
    const double pl = mult.b_lower[p] * (vl[p] - v[p]);
    const double pu = mult.b_upper[p] * (v[p] - vu[p]);
    rep.state_product[p] = ps;
    rep.lower_product[p] = pl;
    rep.upper_product[p] = pu;
    rep.p_state = std::max(rep.p_state, std::abs(ps));
    rep.p_lower = std::max(rep.p_lower, std::abs(pl));
    rep.p_upper = std::max(rep.p_upper, std::abs(pu));
    rep.p_state_pos = std::max(rep.p_state_pos, ps);
    rep.p_lower_pos = std::max(rep.p_lower_pos, pl);
    rep.p_upper_pos = std::max(rep.p_upper_pos, pu);
  }
  return rep;
}

namespace {

void require_constrained(const ProblemSpec& spec, const char* where) {
  if (!spec.constrained || !spec.v_lower || !spec.v_upper)
    throw std::invalid_argument(std::string(where) + ": spec is not a constrained problem");
}

// Pointwise barrier gradients: gu = a.e^{a u},
// gv = -b-.e^{b-(v_minus-v)} + b+.e^{b+(v-v_plus)}.
void barrier_gradients(const ScalarField& u, const ScalarField& v,
                       const BarrierMultipliers& mult, const ProblemSpec& spec,
                       ScalarField& gu, ScalarField& gv) {
  const int m = spec.grid.m;
  const ScalarField& vl = *spec.v_lower;
  const ScalarField& vu = *spec.v_upper;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < m; ++p) {
    gu[p] = mult.a[p] * clamped_exp(mult.a[p] * u[p]);
    gv[p] = -mult.b_lower[p] * clamped_exp(mult.b_lower[p] * (vl[p] - v[p])) +
            mult.b_upper[p] * clamped_exp(mult.b_upper[p] * (v[p] - vu[p]));
  }
}

double barrier_terms(const ScalarField& u, const ScalarField& v,
                     const BarrierMultipliers& mult, const ProblemSpec& spec) {
  const int m = spec.grid.m;
  const double h2 = spec.grid.h * spec.grid.h;
  const ScalarField& vl = *spec.v_lower;
  const ScalarField& vu = *spec.v_upper;
  double s = 0.0;
  for (int p = 0; p < m; ++p)
    s += clamped_exp(mult.a[p] * u[p]) + clamped_exp(mult.b_lower[p] * (vl[p] - v[p])) +
         clamped_exp(mult.b_upper[p] * (v[p] - vu[p]));
  return h2 * s;
}

}  // namespace

double barrier_cost(const ScalarField& u, const ScalarField& v, const ScalarField& w,
                    const BarrierMultipliers& mult, const ProblemSpec& spec,
                    const SpdMatrix& K) {
  require_constrained(spec, "barrier_cost");
  require_same_grid(u, v, "barrier_cost");
  require_same_grid(u, w, "barrier_cost");
  ScalarField diff(spec.grid);
  for (int p = 0; p < spec.grid.m; ++p) diff[p] = u[p] - spec.target[p];
  return 0.5 * l2_inner(diff, diff) + 0.5 * spec.lambda * h1_seminorm_sq(w, K) +
         barrier_terms(u, v, mult, spec);
}

std::pair<ScalarField, ScalarField> barrier_directions(
    const ScalarField& u, const ScalarField& v, const ScalarField& w,
    const BarrierMultipliers& mult, const ProblemSpec& spec, const SpdMatrix& K) {
  require_constrained(spec, "barrier_directions");
  const Grid& g = spec.grid;
  const double h2 = g.h * g.h;
  ScalarField gu(g), gv(g);
  barrier_gradients(u, v, mult, spec, gu, gv);
  ScalarField rhs(g);
  kernels::spmv(K, w.values(), rhs.span());
#pragma omp parallel for schedule(static)
  for (int p = 0; p < g.m; ++p)
    rhs[p] = spec.lambda * rhs[p] - h2 * (u[p] - spec.target[p]) - h2 * gu[p] +
             spec.lambda * h2 * spec.phi.deriv(u[p]) * w[p];
  ScalarField U = solve_spd(K, rhs, spec.linear_solver);
  ScalarField V(g);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < g.m; ++p) V[p] = -(spec.lambda * w[p] + gv[p]);
  return {std::move(U), std::move(V)};
}

BarrierMultipliers update_multipliers(const BarrierMultipliers& mult, const ScalarField& u,
                                      const ScalarField& v, const ProblemSpec& spec) {
  require_constrained(spec, "update_multipliers");
  const Grid& g = spec.grid;
  const ScalarField& vl = *spec.v_lower;
  const ScalarField& vu = *spec.v_upper;
  for (int p = 0; p < g.m; ++p)
    if (!(mult.a[p] > 0.0 && mult.b_lower[p] > 0.0 && mult.b_upper[p] > 0.0))
      throw std::invalid_argument("update_multipliers: multipliers must be strictly positive");
  BarrierMultipliers next{ScalarField(g), ScalarField(g), ScalarField(g)};
#pragma omp parallel for schedule(static)
  for (int p = 0; p < g.m; ++p) {
    next.a[p] = mult.a[p] * clamped_exp(mult.a[p] * u[p]);
    next.b_lower[p] = mult.b_lower[p] * clamped_exp(mult.b_lower[p] * (vl[p] - v[p]));
    next.b_upper[p] = mult.b_upper[p] * clamped_exp(mult.b_upper[p] * (v[p] - vu[p]));
  }
  return next;
}

namespace {

// Inner descent on the barrier cost for fixed multipliers: steepest
// descent directions, Armijo backtracking seeded by the quadratic-part
// step formula. The state law is affine, so the defect moves exactly
// along W and Armijo trials walk that increment; re-solving inside the
// line search would inject solver-tolerance jolts of the same size as
// the Armijo margin near convergence. The defect is refreshed by a
// warm solve every few accepted steps and before returning.
// Direction solves run through slowly-varying auxiliary fields as in
// the unconstrained engine:
//   K s = h^2(u - ubar) + h^2 gu - lambda h^2 phi'(u).w  =>  U = lambda w - s
//   K t = h^2(V - phi'(u).U)                             =>  W = t - U
// Solver fields carried across outer iterations; consecutive inner
// problems differ only by a small multiplier update, so the previous
// auxiliary fields are near-solutions.
struct WarmCache {
  ScalarField s, t, w;
  bool valid = false;
};

class BarrierInnerEngine {
 public:
  BarrierInnerEngine(const ProblemSpec& spec, const BarrierMultipliers& mult,
                     const DescentOptions& opts)
      : spec_(spec), mult_(mult), opts_(opts), g_(spec.grid), h2_(g_.h * g_.h),
        cg_(spec.linear_solver) {}

  DescentState run(const std::pair<ScalarField, ScalarField>& init, WarmCache* cache) {
    const int m = g_.m;
    ScalarField u = init.first;
    ScalarField v = init.second;
    const bool cached = cache && cache->valid;
    ScalarField w = cached ? solve_defect_warm(u, v, cache->w) : solve_defect(u, v, spec_);
    double cost_now = cost_of(u, v, w);

    ScalarField U(g_), V(g_), W(g_), KU(g_), KW(g_), Kw(g_), rhs(g_), gu(g_), gv(g_);
    ScalarField trial_u(g_), trial_v(g_), trial_w(g_);
    ScalarField s = cached ? cache->s : ScalarField(g_);
    ScalarField t = cached ? cache->t : ScalarField(g_);
    bool have_warm = cached;

    int iter = 0;
    double eps_last = 0.0;
    int accepted_since_refresh = 0;
    StopReason reason = StopReason::iteration_limit;

    for (;; ++iter) {
      barrier_gradients(u, v, mult_, spec_, gu, gv);
      kernels::stencil_apply(g_, w.values(), Kw.span());
#pragma omp parallel for schedule(static)
      for (int p = 0; p < m; ++p)
        rhs[p] = h2_ * (u[p] - spec_.target[p]) + h2_ * gu[p] -
                 spec_.lambda * h2_ * spec_.phi.deriv(u[p]) * w[p];
      s = solve_stiffness(g_, rhs, cg_, have_warm ? &s : nullptr);

#pragma omp parallel for schedule(static)
      for (int p = 0; p < m; ++p) {
        U[p] = spec_.lambda * w[p] - s[p];
        V[p] = -(spec_.lambda * w[p] + gv[p]);
      }

      kernels::stencil_apply(g_, U.values(), KU.span());
      const double grad_norm = std::sqrt(kernels::dot(U.values(), KU.values()) +
                                         h2_ * kernels::nrm2_sq(V.values()));
      if (grad_norm <= opts_.grad_tol) {
        reason = StopReason::converged;
        break;
      }
      if (iter >= opts_.max_iters) {
        reason = StopReason::iteration_limit;
        break;
      }

#pragma omp parallel for schedule(static)
      for (int p = 0; p < m; ++p)
        rhs[p] = h2_ * (V[p] - spec_.phi.deriv(u[p]) * U[p]);
      t = solve_stiffness(g_, rhs, cg_, have_warm ? &t : nullptr);
      have_warm = true;
#pragma omp parallel for schedule(static)
      for (int p = 0; p < m; ++p) W[p] = t[p] - U[p];

      kernels::stencil_apply(g_, W.values(), KW.span());
      // Testing U in its own equation and V pointwise collapses the
      // directional derivative of the barrier cost along (U,V) to
      // -||(U,V)||^2 exactly; evaluating the integrals with the solved
      // W instead loses that value to cancellation near convergence.
      const double deriv = -(grad_norm * grad_norm);
      const double num_quad = deriv - h2_ * kernels::dot(gu.values(), U.values()) -
                              h2_ * kernels::dot(gv.values(), V.values());
      const double den_quad = h2_ * kernels::nrm2_sq(U.values()) +
                              spec_.lambda * kernels::dot(W.values(), KW.values());

      double eps = (num_quad < 0.0 && den_quad > 0.0) ? -num_quad / den_quad : 1.0;
      if (!(eps > 0.0) || !std::isfinite(eps)) eps = 1.0;

      bool accepted = false;
      double trial_cost = 0.0;
      while (eps >= opts_.min_step) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < m; ++p) {
          trial_u[p] = u[p] + eps * U[p];
          trial_v[p] = v[p] + eps * V[p];
          trial_w[p] = w[p] + eps * W[p];
        }
        trial_cost = cost_of(trial_u, trial_v, trial_w);
        if (trial_cost <= cost_now + kArmijoDecrease * eps * deriv) {
          accepted = true;
          break;
        }
        eps *= opts_.backtrack_factor;
      }
      if (!accepted) {
        reason = StopReason::degenerate_direction;
        break;
      }
      std::swap(u, trial_u);
      std::swap(v, trial_v);
      std::swap(w, trial_w);
      cost_now = trial_cost;
      eps_last = eps;
      if (++accepted_since_refresh >= kRefreshInterval) {
        w = solve_defect_warm(u, v, w);
        cost_now = cost_of(u, v, w);
        accepted_since_refresh = 0;
      }
    }
    w = solve_defect_warm(u, v, w);
    cost_now = cost_of(u, v, w);

    if (cache) {
      cache->s = std::move(s);
      cache->t = std::move(t);
      cache->w = w;
      cache->valid = have_warm;
    }

    DescentState st;
    st.iter = iter;
    st.u = std::move(u);
    st.v = std::move(v);
    st.w = std::move(w);
    st.cost = cost_now;
    st.grad_norm_sq = 0.0;
    st.eps = eps_last;
    st.residual_h1 = std::sqrt(h1_seminorm_sq(st.w));
    st.stop = reason;
    return st;
  }

 private:
  static constexpr double kArmijoDecrease = 1e-4;
  static constexpr int kRefreshInterval = 16;

  // Compensated sums, matching the unconstrained engine.
  double cost_of(const ScalarField& u, const ScalarField& v, const ScalarField& w) const {
    ScalarField diff(g_), Kw(g_);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < g_.m; ++p) diff[p] = u[p] - spec_.target[p];
    kernels::stencil_apply(g_, w.values(), Kw.span());
    return 0.5 * h2_ * kernels::dot_compensated(diff.values(), diff.values()) +
           0.5 * spec_.lambda * kernels::dot_compensated(w.values(), Kw.values()) +
           barrier_terms(u, v, mult_, spec_);
  }

  ScalarField solve_defect_warm(const ScalarField& u, const ScalarField& v,
                                const ScalarField& w_guess) const {
    ScalarField rhs(g_);
    kernels::stencil_apply(g_, u.values(), rhs.span());
#pragma omp parallel for schedule(static)
    for (int p = 0; p < g_.m; ++p)
      rhs[p] = h2_ * (v[p] - spec_.phi.eval(u[p])) - rhs[p];
    return solve_stiffness(g_, rhs, cg_, &w_guess);
  }

  const ProblemSpec& spec_;
  const BarrierMultipliers& mult_;
  const DescentOptions& opts_;
  Grid g_;
  double h2_;
  CgOptions cg_;
};

}  // namespace

DescentState inner_solve(const ProblemSpec& spec, const BarrierMultipliers& mult,
                         const DescentOptions& opts,
                         const std::pair<ScalarField, ScalarField>& init) {
  require_constrained(spec, "inner_solve");
  spec.validate();
  opts.validate();
  if (!spec.phi.is_affine())
    throw std::invalid_argument("the constrained solver requires an affine state law");
  BarrierInnerEngine engine(spec, mult, opts);
  return engine.run(init, nullptr);
}

BarrierResult run_barrier(const ProblemSpec& spec, const DescentOptions& opts,
                          double outer_tol, int max_outer,
                          const BarrierMultipliers* init_mult,
                          const OuterProgress& progress) {
  require_constrained(spec, "run_barrier");
  spec.validate();
  opts.validate();
  if (!(outer_tol > 0.0)) throw std::invalid_argument("outer_tol must be positive");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be at least 1");
  if (!spec.phi.is_affine())
    throw std::invalid_argument("the constrained solver requires an affine state law");

  BarrierMultipliers mult =
      init_mult ? *init_mult : BarrierMultipliers::constant(spec.grid, 0.1);

  BarrierResult out;
  std::pair<ScalarField, ScalarField> start{ScalarField(spec.grid), ScalarField(spec.grid)};
  const ScalarField& vl = *spec.v_lower;
  const ScalarField& vu = *spec.v_upper;
  WarmCache cache;

  for (int outer = 1; outer <= max_outer; ++outer) {
    BarrierInnerEngine engine(spec, mult, opts);
    DescentState state = engine.run(start, &cache);
    CertificateReport cert = certificates(mult, state.u, state.v, spec);

    OuterRecord rec;
    rec.outer_iter = outer;
    rec.inner_iters = state.iter;
    {
      ScalarField diff(spec.grid);
      for (int p = 0; p < spec.grid.m; ++p) diff[p] = state.u[p] - spec.target[p];
      rec.cost = 0.5 * l2_inner(diff, diff) + 0.5 * spec.lambda * h1_seminorm_sq(state.w);
    }
    rec.cert_state = cert.p_state;
    rec.cert_lower = cert.p_lower;
    rec.cert_upper = cert.p_upper;
    for (int p = 0; p < spec.grid.m; ++p) {
      rec.max_violation_u = std::max(rec.max_violation_u, state.u[p]);
      rec.max_violation_v = std::max({rec.max_violation_v, state.v[p] - vu[p], vl[p] - state.v[p]});
    }
    rec.max_violation_u = std::max(rec.max_violation_u, 0.0);
    rec.max_violation_v = std::max(rec.max_violation_v, 0.0);
    out.outer_log.push_back(rec);
    if (progress) progress(rec);

    start = {state.u, state.v};
    out.state = std::move(state);
    out.certificates = std::move(cert);
    out.multipliers = mult;

    if (out.certificates.max_abs() <= outer_tol && out.certificates.max_pos() <= outer_tol) {
      out.converged = true;
      break;
    }
    mult = update_multipliers(mult, out.state.u, out.state.v, spec);
  }
  return out;
}

}  // namespace defopt
