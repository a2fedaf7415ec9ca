// Times the OpenMP kernels against their serial reference twins and a
// full CG solve over both routes. Results must agree to reduction-order
// rounding; the table reports throughput and speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "defopt/cg.hpp"
#include "defopt/grid.hpp"
#include "defopt/kernels.hpp"
#include "defopt/spd.hpp"

using namespace defopt;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
double time_op(F&& op, int reps) {
  op();  // warm up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) op();
  return seconds_since(t0) / reps;
}

ScalarField random_field(const Grid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (int p = 0; p < g.m; ++p) f[p] = dist(rng);
  return f;
}

void bench_grid(int n) {
  std::mt19937 rng(12345);
  const Grid g = build_grid(n);
  const SpdMatrix K = assemble_stiffness(g);
  const ScalarField x = random_field(g, rng);
  ScalarField y(g), y_ref(g);
  const int reps = std::max(4, 2000000 / g.m);

  std::printf("n=%d (m=%d interior nodes, %d repetitions)\n", n, g.m, reps);

  struct Row {
    const char* name;
    double t_omp, t_ref;
    double max_diff;
  };
  std::vector<Row> rows;

  kernels::stencil_apply(g, x.values(), y.span());
  ref::stencil_apply(g, x.values(), y_ref.span());
  double diff = 0.0;
  for (int p = 0; p < g.m; ++p) diff = std::max(diff, std::abs(y[p] - y_ref[p]));
  rows.push_back({"stencil_apply",
                  time_op([&] { kernels::stencil_apply(g, x.values(), y.span()); }, reps),
                  time_op([&] { ref::stencil_apply(g, x.values(), y_ref.span()); }, reps),
                  diff});

  kernels::spmv(K, x.values(), y.span());
  ref::spmv(K, x.values(), y_ref.span());
  diff = 0.0;
  for (int p = 0; p < g.m; ++p) diff = std::max(diff, std::abs(y[p] - y_ref[p]));
  rows.push_back({"spmv(csr)",
                  time_op([&] { kernels::spmv(K, x.values(), y.span()); }, reps),
                  time_op([&] { ref::spmv(K, x.values(), y_ref.span()); }, reps), diff});

  const double d_omp = kernels::dot(x.values(), y.values());
  const double d_ref = ref::dot(x.values(), y.values());
  rows.push_back({"dot",
                  time_op([&] { (void)kernels::dot(x.values(), y.values()); }, reps),
                  time_op([&] { (void)ref::dot(x.values(), y.values()); }, reps),
                  std::abs(d_omp - d_ref)});

  rows.push_back({"axpy",
                  time_op([&] { kernels::axpy(0.5, x.values(), y.span()); }, reps),
                  time_op([&] { ref::axpy(0.5, x.values(), y_ref.span()); }, reps), 0.0});

  std::printf("  %-14s %12s %12s %9s %10s\n", "kernel", "omp [us]", "serial [us]",
              "speedup", "max diff");
  for (const Row& r : rows)
    std::printf("  %-14s %12.2f %12.2f %8.2fx %10.2e\n", r.name, 1e6 * r.t_omp,
                1e6 * r.t_ref, r.t_ref / r.t_omp, r.max_diff);

  // full CG solve, stencil route vs CSR route
  ScalarField rhs = random_field(g, rng);
  CgOptions opts;
  CgStats stats_stencil, stats_csr;
  const auto t0 = clock_type::now();
  const ScalarField z1 = solve_stiffness(g, rhs, opts, nullptr, &stats_stencil);
  const double t_stencil = seconds_since(t0);
  const auto t1 = clock_type::now();
  const ScalarField z2 = solve_spd(K, rhs, opts, nullptr, &stats_csr);
  const double t_csr = seconds_since(t1);
  diff = 0.0;
  for (int p = 0; p < g.m; ++p) diff = std::max(diff, std::abs(z1[p] - z2[p]));
  std::printf("  cg stencil: %.3f ms (%d iters)   cg csr: %.3f ms (%d iters)   max diff %.2e\n\n",
              1e3 * t_stencil, stats_stencil.iterations, 1e3 * t_csr, stats_csr.iterations,
              diff);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> sizes = {64, 128, 256, 512};
  if (argc > 1) {
    sizes.clear();
    for (int i = 1; i < argc; ++i) sizes.push_back(std::atoi(argv[i]));
  }
  for (int n : sizes) bench_grid(n);
  return 0;
}
