#ifndef DEFOPT_TESTS_SUPPORT_HPP
#define DEFOPT_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "defopt/grid.hpp"
#include "defopt/spd.hpp"

// Small dense helpers for the test oracles. Deliberately independent of
// the library's sparse/CG path: plain Gaussian elimination.
namespace testsup {

using Matrix = std::vector<std::vector<double>>;

inline Matrix dense_from(const defopt::SpdMatrix& A) {
  Matrix M(static_cast<std::size_t>(A.dim),
           std::vector<double>(static_cast<std::size_t>(A.dim), 0.0));
  for (int r = 0; r < A.dim; ++r)
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      M[static_cast<std::size_t>(r)][static_cast<std::size_t>(A.cols[static_cast<std::size_t>(k)])] =
          A.vals[static_cast<std::size_t>(k)];
  return M;
}

inline std::vector<double> dense_solve(Matrix A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-14) throw std::runtime_error("dense_solve: singular matrix");
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return x;
}

inline std::vector<double> matvec(const Matrix& A, const std::vector<double>& x) {
  std::vector<double> y(A.size(), 0.0);
  for (std::size_t r = 0; r < A.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += A[r][c] * x[c];
  return y;
}

inline Matrix matmul(const Matrix& A, const Matrix& B) {
  const std::size_t n = A.size(), m = B[0].size(), k = B.size();
  Matrix C(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < m; ++j) C[i][j] += A[i][l] * B[l][j];
  return C;
}

inline Matrix dense_inverse(const Matrix& A) {
  const std::size_t n = A.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> e(n, 0.0);
    e[c] = 1.0;
    const std::vector<double> col = dense_solve(A, e);
    for (std::size_t r = 0; r < n; ++r) inv[r][c] = col[r];
  }
  return inv;
}

inline defopt::ScalarField random_field(const defopt::Grid& g, unsigned seed,
                                        double lo = -1.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  defopt::ScalarField f(g);
  for (int p = 0; p < g.m; ++p) f[p] = dist(rng);
  return f;
}

// Sum of squared differences over every horizontal/vertical node pair,
// including edges to the zero boundary: the independent route to z'Kz.
inline double edge_sum_sq(const defopt::ScalarField& z) {
  const defopt::Grid& g = z.grid();
  const int n = g.n;
  auto value = [&](int i, int j) -> double {
    if (i <= 0 || i >= n || j <= 0 || j >= n) return 0.0;
    return z.at(i, j);
  };
  double s = 0.0;
  // horizontal edges: (i,j)-(i+1,j) for i=0..n-1, j=1..n-1
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double d = value(i, j) - value(i + 1, j);
      s += d * d;
    }
  // vertical edges
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = value(i, j) - value(i, j + 1);
      s += d * d;
    }
  return s;
}

// Mirror of a field under x <-> 1-x.
inline defopt::ScalarField mirror_x(const defopt::ScalarField& f) {
  const defopt::Grid& g = f.grid();
  defopt::ScalarField out(g);
  for (int j = 1; j < g.n; ++j)
    for (int i = 1; i < g.n; ++i) out.at(i, j) = f.at(g.n - i, j);
  return out;
}

inline double max_abs_diff(const defopt::ScalarField& a, const defopt::ScalarField& b) {
  double m = 0.0;
  for (int p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

}  // namespace testsup

#endif
