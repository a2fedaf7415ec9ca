#include "defopt/spd.hpp"

#include <cmath>

#include "defopt/kernels.hpp"

namespace defopt {

double SpdMatrix::entry(int i, int j) const {
  for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (cols[static_cast<std::size_t>(k)] == j) return vals[static_cast<std::size_t>(k)];
  return 0.0;
}

SpdMatrix assemble_stiffness(const Grid& g) {
  const int s = g.n - 1;
  SpdMatrix K;
  K.dim = g.m;
  K.row_ptr.reserve(static_cast<std::size_t>(g.m) + 1);
  K.cols.reserve(static_cast<std::size_t>(g.m) * 5);
  K.vals.reserve(static_cast<std::size_t>(g.m) * 5);
  K.row_ptr.push_back(0);
  for (int j = 1; j <= s; ++j) {
    for (int i = 1; i <= s; ++i) {
      // columns in ascending index order
      if (j > 1) { K.cols.push_back(g.index(i, j - 1)); K.vals.push_back(-1.0); }
      if (i > 1) { K.cols.push_back(g.index(i - 1, j)); K.vals.push_back(-1.0); }
      K.cols.push_back(g.index(i, j));
      K.vals.push_back(4.0);
      if (i < s) { K.cols.push_back(g.index(i + 1, j)); K.vals.push_back(-1.0); }
      if (j < s) { K.cols.push_back(g.index(i, j + 1)); K.vals.push_back(-1.0); }
      K.row_ptr.push_back(static_cast<int>(K.cols.size()));
    }
  }
  return K;
}

double l2_inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g, "l2_inner");
  const double h = f.grid().h;
  return h * h * kernels::dot(f.values(), g.values());
}

double l2_norm(const ScalarField& f) {
  return std::sqrt(l2_inner(f, f));
}

double h1_seminorm_sq(const ScalarField& w, const SpdMatrix& K) {
  if (K.dim != w.size())
    throw std::invalid_argument("h1_seminorm_sq: matrix/field dimension mismatch");
  std::vector<double> Kw(static_cast<std::size_t>(K.dim));
  kernels::spmv(K, w.values(), Kw);
  return kernels::dot(w.values(), Kw);
}

double h1_seminorm_sq(const ScalarField& w) {
  std::vector<double> Kw(static_cast<std::size_t>(w.size()));
  kernels::stencil_apply(w.grid(), w.values(), Kw);
  return kernels::dot(w.values(), Kw);
}

}  // namespace defopt
