#ifndef DEFOPT_GRID_HPP
#define DEFOPT_GRID_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace defopt {

// Uniform node-centered grid on the unit square with homogeneous
// Dirichlet boundary. Only interior nodes carry unknowns; boundary
// values are implicitly zero.
struct Grid {
  int n = 0;     // subdivisions per side
  double h = 0;  // mesh width, 1/n
  int m = 0;     // interior node count, (n-1)^2

  Grid() = default;

  // Row-major interior index, x fastest: (i,j) -> (j-1)*(n-1)+(i-1),
  // i,j in 1..n-1.
  int index(int i, int j) const { return (j - 1) * (n - 1) + (i - 1); }
  double x(int i) const { return i * h; }
  double y(int j) const { return j * h; }

  bool operator==(const Grid& other) const { return n == other.n; }
};

Grid build_grid(int n);

// Nodal values over the interior nodes of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid_(g), values_(static_cast<std::size_t>(g.m), fill) {}
  ScalarField(const Grid& g, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.m; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](int p) { return values_[static_cast<std::size_t>(p)]; }
  double operator[](int p) const { return values_[static_cast<std::size_t>(p)]; }

  double& at(int i, int j) { return values_[static_cast<std::size_t>(grid_.index(i, j))]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(grid_.index(i, j))]; }

  const std::vector<double>& values() const { return values_; }
  std::span<double> span() { return {values_.data(), values_.size()}; }
  std::span<const double> span() const { return {values_.data(), values_.size()}; }

  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline void require_same_grid(const ScalarField& a, const ScalarField& b,
                              const char* where) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

}  // namespace defopt

#endif
