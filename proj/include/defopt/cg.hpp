#ifndef DEFOPT_CG_HPP
#define DEFOPT_CG_HPP

#include <functional>
#include <optional>
#include <stdexcept>

#include "defopt/grid.hpp"
#include "defopt/spd.hpp"

namespace defopt {

// Thrown when conjugate gradients fails to reach its tolerance.
class IterationLimitError : public std::runtime_error {
 public:
  IterationLimitError(const std::string& what, double residual)
      : std::runtime_error(what), final_residual_(residual) {}
  double final_residual() const { return final_residual_; }

 private:
  double final_residual_;
};

struct CgOptions {
  double tol = 1e-10;  // ||Kz - b|| <= tol * max(floor, ||b||)
  int max_iter = 0;    // 0 means 10 * dimension
  double floor = 1.0;  // 0 makes the tolerance purely relative to ||b||
};

struct CgStats {
  int iterations = 0;
  double residual = 0.0;
};

// Conjugate gradients for K z = rhs with K symmetric positive definite.
// Starts from x0 when given, otherwise from zero.
ScalarField solve_spd(const SpdMatrix& K, const ScalarField& rhs,
                      const CgOptions& opts = {},
                      const ScalarField* x0 = nullptr,
                      CgStats* stats = nullptr);

// Same iteration, matrix-free against the five-point stiffness stencil
// of the grid. Agrees with the CSR route to solver tolerance.
ScalarField solve_stiffness(const Grid& g, const ScalarField& rhs,
                            const CgOptions& opts = {},
                            const ScalarField* x0 = nullptr,
                            CgStats* stats = nullptr);

// Generic SPD operator variant (used by the classical oracle).
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;
ScalarField solve_operator(const LinearOperator& apply, const ScalarField& rhs,
                           const CgOptions& opts = {},
                           const ScalarField* x0 = nullptr,
                           CgStats* stats = nullptr);

}  // namespace defopt

#endif
