#include "defopt/problem.hpp"

#include <cmath>
#include <functional>

#include "defopt/kernels.hpp"

namespace defopt {

void ProblemSpec::validate() const {
  if (grid.n < 2) throw std::invalid_argument("resolution must be >= 2");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (mu < 0.0) throw std::invalid_argument("mu must be non-negative");
  if (target.size() != grid.m)
    throw std::invalid_argument("target field does not match the grid");
  if (!target.all_finite()) throw std::invalid_argument("target field has non-finite entries");
  if (constrained) {
    if (!v_lower || !v_upper)
      throw std::invalid_argument("constrained problem needs both control bounds");
    if (v_lower->size() != grid.m || v_upper->size() != grid.m)
      throw std::invalid_argument("bound fields do not match the grid");
    for (int p = 0; p < grid.m; ++p)
      if ((*v_lower)[p] > (*v_upper)[p])
        throw std::invalid_argument("v_lower exceeds v_upper at some node");
  }
}

namespace {

// rhs = h^2 (v - phi(u)) - K u
ScalarField defect_rhs(const ScalarField& u, const ScalarField& v,
                       const ProblemSpec& spec,
                       const std::function<void(std::span<const double>, std::span<double>)>& apply) {
  require_same_grid(u, v, "solve_defect");
  const double h2 = spec.grid.h * spec.grid.h;
  ScalarField rhs(spec.grid);
  apply(u.values(), rhs.span());
  const Nonlinearity& phi = spec.phi;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < spec.grid.m; ++p)
    rhs[p] = h2 * (v[p] - phi.eval(u[p])) - rhs[p];
  return rhs;
}

}  // namespace

ScalarField solve_defect(const ScalarField& u, const ScalarField& v,
                         const ProblemSpec& spec, const SpdMatrix& K) {
  ScalarField rhs = defect_rhs(u, v, spec, [&K](std::span<const double> in, std::span<double> out) {
    kernels::spmv(K, in, out);
  });
  return solve_spd(K, rhs, spec.linear_solver);
}

ScalarField solve_defect(const ScalarField& u, const ScalarField& v,
                         const ProblemSpec& spec) {
  const Grid& g = spec.grid;
  ScalarField rhs = defect_rhs(u, v, spec, [&g](std::span<const double> in, std::span<double> out) {
    kernels::stencil_apply(g, in, out);
  });
  return solve_stiffness(g, rhs, spec.linear_solver);
}

double cost(const ScalarField& u, const ScalarField& v, const ScalarField& w,
            const ProblemSpec& spec, const SpdMatrix& K) {
  require_same_grid(u, v, "cost");
  require_same_grid(u, w, "cost");
  ScalarField diff(spec.grid);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < spec.grid.m; ++p) diff[p] = u[p] - spec.target[p];
  double value = 0.5 * l2_inner(diff, diff) + 0.5 * spec.lambda * h1_seminorm_sq(w, K);
  if (!spec.constrained) value += 0.5 * spec.mu * l2_inner(v, v);
  return value;
}

KktResidual kkt_residual(const ScalarField& u, const ScalarField& v,
                         const ScalarField& w, const ProblemSpec& spec,
                         const SpdMatrix& K) {
  require_same_grid(u, v, "kkt_residual");
  require_same_grid(u, w, "kkt_residual");
  if (K.dim != u.size())
    throw std::invalid_argument("kkt_residual: matrix/field dimension mismatch");
  const Grid& g = spec.grid;
  const double h2 = g.h * g.h;

  // rho = h^2 (u - ubar - lambda phi'(u).w) - lambda K w, the discrete
  // transcription of u - ubar - lambda phi'(u) w + lambda Lap(w) scaled
  // by h^2; dividing the Euclidean norm by h makes it an L2 quantity.
  ScalarField rho(g);
  kernels::spmv(K, w.values(), rho.span());
#pragma omp parallel for schedule(static)
  for (int p = 0; p < g.m; ++p)
    rho[p] = h2 * (u[p] - spec.target[p] - spec.lambda * spec.phi.deriv(u[p]) * w[p]) -
             spec.lambda * rho[p];

  ScalarField grad_v(g);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < g.m; ++p) grad_v[p] = spec.mu * v[p] + spec.lambda * w[p];

  KktResidual res;
  res.stationarity_u = std::sqrt(kernels::nrm2_sq(rho.values())) / g.h;
  res.stationarity_v = l2_norm(grad_v);
  return res;
}

}  // namespace defopt
