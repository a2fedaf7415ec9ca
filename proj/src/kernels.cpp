#include "defopt/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace defopt::kernels {

// Chunked reduction: per-chunk partials summed in index order, so the
// result does not depend on the thread count.
double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const std::size_t nchunks = (n + reduction_chunk - 1) / reduction_chunk;
  if (nchunks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * reduction_chunk;
    const std::size_t hi = std::min(lo + reduction_chunk, n);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double nrm2_sq(std::span<const double> x) { return dot(x, x); }

double dot_compensated(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double term = x[i] * y[i];
    const double next = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - next) + term;
    else
      comp += (term - next) + sum;
    sum = next;
  }
  return sum + comp;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i)
    y[static_cast<std::size_t>(i)] += a * x[static_cast<std::size_t>(i)];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i)
    y[static_cast<std::size_t>(i)] =
        x[static_cast<std::size_t>(i)] + b * y[static_cast<std::size_t>(i)];
}

void scale(double a, std::span<double> x) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i)
    x[static_cast<std::size_t>(i)] *= a;
}

void copy(std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  std::copy(x.begin(), x.end(), y.begin());
}

void fill(std::span<double> x, double value) { std::fill(x.begin(), x.end(), value); }

void spmv(const SpdMatrix& A, std::span<const double> x, std::span<double> y) {
  assert(static_cast<int>(x.size()) == A.dim && static_cast<int>(y.size()) == A.dim);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < A.dim; ++r) {
    double s = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      s += A.vals[static_cast<std::size_t>(k)] *
           x[static_cast<std::size_t>(A.cols[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(r)] = s;
  }
}

void stencil_apply(const Grid& g, std::span<const double> x, std::span<double> y) {
  const int s = g.n - 1;  // nodes per side
  assert(static_cast<int>(x.size()) == g.m && static_cast<int>(y.size()) == g.m);
  if (s == 1) {
    y[0] = 4.0 * x[0];
    return;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < s; ++j) {
    const double* row = x.data() + static_cast<std::ptrdiff_t>(j) * s;
    const double* below = j > 0 ? row - s : nullptr;
    const double* above = j < s - 1 ? row + s : nullptr;
    double* out = y.data() + static_cast<std::ptrdiff_t>(j) * s;
    out[0] = 4.0 * row[0] - row[1];
    for (int i = 1; i < s - 1; ++i) out[i] = 4.0 * row[i] - row[i - 1] - row[i + 1];
    out[s - 1] = 4.0 * row[s - 1] - row[s - 2];
    if (below)
      for (int i = 0; i < s; ++i) out[i] -= below[i];
    if (above)
      for (int i = 0; i < s; ++i) out[i] -= above[i];
  }
}

}  // namespace defopt::kernels

namespace defopt::ref {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double nrm2_sq(std::span<const double> x) { return dot(x, x); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + b * y[i];
}

void spmv(const SpdMatrix& A, std::span<const double> x, std::span<double> y) {
  for (int r = 0; r < A.dim; ++r) {
    double s = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      s += A.vals[static_cast<std::size_t>(k)] *
           x[static_cast<std::size_t>(A.cols[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(r)] = s;
  }
}

void stencil_apply(const Grid& g, std::span<const double> x, std::span<double> y) {
  const int s = g.n - 1;
  for (int j = 1; j <= s; ++j) {
    for (int i = 1; i <= s; ++i) {
      const int p = g.index(i, j);
      double v = 4.0 * x[static_cast<std::size_t>(p)];
      if (i > 1) v -= x[static_cast<std::size_t>(g.index(i - 1, j))];
      if (i < s) v -= x[static_cast<std::size_t>(g.index(i + 1, j))];
      if (j > 1) v -= x[static_cast<std::size_t>(g.index(i, j - 1))];
      if (j < s) v -= x[static_cast<std::size_t>(g.index(i, j + 1))];
      y[static_cast<std::size_t>(p)] = v;
    }
  }
}

}  // namespace defopt::ref
