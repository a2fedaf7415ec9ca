#include "defopt/grid.hpp"

#include <cmath>

namespace defopt {

Grid build_grid(int n) {
  if (n < 2) throw std::invalid_argument("resolution must be >= 2");
  Grid g;
  g.n = n;
  g.h = 1.0 / n;
  g.m = (n - 1) * (n - 1);
  return g;
}

ScalarField::ScalarField(const Grid& g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != g.m)
    throw std::invalid_argument("field length does not match grid node count");
}

bool ScalarField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace defopt
