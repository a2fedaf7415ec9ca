#include "defopt/cg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "defopt/kernels.hpp"

namespace defopt {

namespace {

template <typename MatVec>
ScalarField cg_run(MatVec&& apply, const ScalarField& rhs, const CgOptions& opts,
                   const ScalarField* x0, CgStats* stats) {
  if (opts.tol <= 0) throw std::invalid_argument("solver tolerance must be positive");
  const int m = rhs.size();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * m;

  ScalarField x = x0 ? *x0 : ScalarField(rhs.grid());
  std::vector<double> r(static_cast<std::size_t>(m));
  std::vector<double> q(static_cast<std::size_t>(m));

  const double rhs_norm = std::sqrt(kernels::nrm2_sq(rhs.values()));
  if (rhs_norm == 0.0) return ScalarField(rhs.grid());  // exact solution
  const double target = opts.tol * std::max(opts.floor, rhs_norm);
  const double target_sq = target * target;

  // r = rhs - K x
  if (x0) {
    apply(x.values(), std::span<double>(r));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i)
      r[static_cast<std::size_t>(i)] = rhs[i] - r[static_cast<std::size_t>(i)];
  } else {
    kernels::copy(rhs.values(), r);
  }

  double rs = kernels::nrm2_sq(r);
  if (stats) {
    stats->iterations = 0;
    stats->residual = std::sqrt(rs);
  }
  if (rs <= target_sq) return x;

  std::vector<double> p = r;
  int it = 0;
  while (it < max_iter) {
    ++it;
    apply(std::span<const double>(p), std::span<double>(q));
    const double pq = kernels::dot(p, q);
    if (pq <= 0.0) throw std::runtime_error("conjugate gradients: operator is not positive definite");
    const double alpha = rs / pq;
    kernels::axpy(alpha, p, x.span());
    kernels::axpy(-alpha, q, r);
    const double rs_next = kernels::nrm2_sq(r);
    if (rs_next <= target_sq) {
      // recurrence residual can drift; confirm against the true residual
      apply(x.values(), std::span<double>(q));
#pragma omp parallel for schedule(static)
      for (int i = 0; i < m; ++i)
        q[static_cast<std::size_t>(i)] = rhs[i] - q[static_cast<std::size_t>(i)];
      const double true_rs = kernels::nrm2_sq(q);
      if (true_rs <= target_sq) {
        if (stats) {
          stats->iterations = it;
          stats->residual = std::sqrt(true_rs);
        }
        return x;
      }
      kernels::copy(q, r);
      rs = kernels::nrm2_sq(r);
      std::fill(p.begin(), p.end(), 0.0);
      kernels::axpy(1.0, r, p);  // restart
      continue;
    }
    const double beta = rs_next / rs;
    rs = rs_next;
    kernels::xpby(r, beta, p);
  }
  throw IterationLimitError(
      "conjugate gradients: no convergence within " + std::to_string(max_iter) +
          " iterations (residual " + std::to_string(std::sqrt(rs)) + ")",
      std::sqrt(rs));
}

}  // namespace

ScalarField solve_spd(const SpdMatrix& K, const ScalarField& rhs, const CgOptions& opts,
                      const ScalarField* x0, CgStats* stats) {
  if (K.dim != rhs.size())
    throw std::invalid_argument("solve_spd: matrix/rhs dimension mismatch");
  return cg_run(
      [&K](std::span<const double> in, std::span<double> out) { kernels::spmv(K, in, out); },
      rhs, opts, x0, stats);
}

ScalarField solve_stiffness(const Grid& g, const ScalarField& rhs, const CgOptions& opts,
                            const ScalarField* x0, CgStats* stats) {
  return cg_run(
      [&g](std::span<const double> in, std::span<double> out) {
        kernels::stencil_apply(g, in, out);
      },
      rhs, opts, x0, stats);
}

ScalarField solve_operator(const LinearOperator& apply, const ScalarField& rhs,
                           const CgOptions& opts, const ScalarField* x0, CgStats* stats) {
  return cg_run([&apply](std::span<const double> in, std::span<double> out) { apply(in, out); },
                rhs, opts, x0, stats);
}

}  // namespace defopt
