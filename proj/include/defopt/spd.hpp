#ifndef DEFOPT_SPD_HPP
#define DEFOPT_SPD_HPP

#include <vector>

#include "defopt/grid.hpp"

namespace defopt {

// Symmetric positive definite matrix in compressed row storage.
struct SpdMatrix {
  int dim = 0;
  std::vector<int> row_ptr;  // dim+1 offsets
  std::vector<int> cols;
  std::vector<double> vals;

  int nnz() const { return static_cast<int>(cols.size()); }
  double entry(int i, int j) const;  // 0 if not stored
};

// Five-point difference stencil for -div(grad .) with Dirichlet data,
// scaled so z'Kz equals the sum of squared differences over all grid
// edges (including edges to the zero boundary), i.e. z'Kz ~ int |grad z|^2.
SpdMatrix assemble_stiffness(const Grid& g);

double l2_inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double h1_seminorm_sq(const ScalarField& w, const SpdMatrix& K);
double h1_seminorm_sq(const ScalarField& w);  // stencil route, no stored matrix

}  // namespace defopt

#endif
