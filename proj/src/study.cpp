#include "defopt/study.hpp"

#include <cmath>

#include "defopt/barrier.hpp"
#include "defopt/kernels.hpp"

namespace defopt {

ClassicalSolution classical_kkt_solve(const ProblemSpec& spec) {
  spec.validate();
  if (spec.constrained)
    throw std::invalid_argument("classical_kkt_solve: constrained problems are out of scope");
  if (!spec.phi.is_affine())
    throw std::invalid_argument("classical_kkt_solve requires an affine reaction term");
  const double c0 = spec.phi.coeffs()[0];
  const double c1 = spec.phi.coeffs()[1];
  if (c1 < 0.0)
    throw std::invalid_argument("classical_kkt_solve requires a non-negative affine slope");
  if (!(spec.mu > 0.0)) throw std::invalid_argument("classical_kkt_solve requires mu > 0");

  const Grid& g = spec.grid;
  const int m = g.m;
  const double h2 = g.h * g.h;
  const double sigma = h2 * h2 / spec.mu;

  auto apply_A = [&](std::span<const double> in, std::span<double> out) {
    kernels::stencil_apply(g, in, out);
    if (c1 != 0.0) kernels::axpy(c1 * h2, in, out);
  };

  // (A^2 + h^4/mu) u = h^4/mu ubar - c0 h^2 A.1
  ScalarField rhs(g);
  {
    ScalarField one(g, 1.0);
    apply_A(one.values(), rhs.span());
#pragma omp parallel for schedule(static)
    for (int p = 0; p < m; ++p)
      rhs[p] = sigma * spec.target[p] - c0 * h2 * rhs[p];
  }

  CgOptions oracle_opts = spec.linear_solver;
  oracle_opts.tol = std::min(oracle_opts.tol, 1e-12);
  oracle_opts.max_iter = 40 * m;

  std::vector<double> Ax(static_cast<std::size_t>(m));
  const LinearOperator apply_squared = [&](std::span<const double> in, std::span<double> out) {
    apply_A(in, Ax);
    apply_A(Ax, out);
    kernels::axpy(sigma, in, out);
  };
  ScalarField u = solve_operator(apply_squared, rhs, oracle_opts);

  // adjoint A p = -h^2 (u - ubar); control from the state equation.
  ScalarField arhs(g);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < m; ++p) arhs[p] = -h2 * (u[p] - spec.target[p]);
  ScalarField p_field = solve_operator(
      [&](std::span<const double> in, std::span<double> out) { apply_A(in, out); }, arhs,
      oracle_opts);

  ScalarField v(g);
  apply_A(u.values(), v.span());
#pragma omp parallel for schedule(static)
  for (int p = 0; p < m; ++p) v[p] = v[p] / h2 + c0;

  return {std::move(u), std::move(v), std::move(p_field)};
}

ContinuationResult run_continuation(const ProblemSpec& spec,
                                    const std::vector<double>& lambdas,
                                    const DescentOptions& opts) {
  spec.validate();
  if (lambdas.empty()) throw std::invalid_argument("lambda sweep must not be empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw std::invalid_argument("lambda values must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw std::invalid_argument("lambda sweep must be strictly ascending");
  }

  ContinuationResult out;
  out.lambdas = lambdas;

  const bool oracle_applies = !spec.constrained && spec.phi.is_affine() &&
                              spec.mu > 0.0 && spec.phi.coeffs()[1] >= 0.0;
  if (oracle_applies) out.oracle = classical_kkt_solve(spec);

  const Grid& g = spec.grid;
  const double h2 = g.h * g.h;
  std::pair<ScalarField, ScalarField> warm{ScalarField(g), ScalarField(g)};

  for (double lambda : lambdas) {
    ProblemSpec step = spec;
    step.lambda = lambda;
    ContinuationEntry entry;
    entry.lambda = lambda;
    try {
      if (step.constrained) {
        BarrierResult br = run_barrier(step, opts, 1e-3, 1000);
        entry.u = br.state.u;
        entry.v = br.state.v;
        entry.cost = br.state.cost;
        entry.residual_h1 = br.state.residual_h1;
        entry.converged = br.converged;
        const double wkw = h1_seminorm_sq(br.state.w);
        entry.weighted_residual =
            lambda * (wkw + h2 * kernels::nrm2_sq(br.state.w.values()));
      } else {
        DescentResult res = run_descent(step, opts, &warm);
        entry.u = res.state.u;
        entry.v = res.state.v;
        entry.cost = res.state.cost;
        entry.residual_h1 = res.state.residual_h1;
        entry.converged = res.state.stop == StopReason::converged;
        const double wkw = h1_seminorm_sq(res.state.w);
        entry.weighted_residual =
            lambda * (wkw + h2 * kernels::nrm2_sq(res.state.w.values()));
      }
    } catch (const DegenerateDirectionError&) {
      entry.converged = false;
      entry.u = warm.first;
      entry.v = warm.second;
    }
    if (entry.u.size() == g.m && entry.v.size() == g.m)
      warm = {entry.u, entry.v};
    if (oracle_applies && entry.u.size() == g.m) {
      ScalarField du(g), dv(g);
#pragma omp parallel for schedule(static)
      for (int p = 0; p < g.m; ++p) {
        du[p] = entry.u[p] - out.oracle->u[p];
        dv[p] = entry.v[p] - out.oracle->v[p];
      }
      entry.dist_u_oracle = l2_norm(du);
      entry.dist_v_oracle = l2_norm(dv);
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace defopt
