#ifndef DEFOPT_KERNELS_HPP
#define DEFOPT_KERNELS_HPP

#include <cstddef>
#include <span>

#include "defopt/grid.hpp"
#include "defopt/spd.hpp"

// Data-parallel kernels behind every solver loop. The OpenMP versions
// live in defopt::kernels and are the production path; plain serial
// twins live in defopt::ref and serve as the reference for tests and
// the kernel benchmark.
//
// Reductions use fixed-size chunks combined in index order, so results
// are identical for any thread count.

namespace defopt::kernels {

inline constexpr std::size_t reduction_chunk = 4096;

double dot(std::span<const double> x, std::span<const double> y);
double nrm2_sq(std::span<const double> x);

// Neumaier-compensated dot product; used where cost comparisons must
// resolve decreases near machine granularity.
double dot_compensated(std::span<const double> x, std::span<const double> y);

void axpy(double a, std::span<const double> x, std::span<double> y);   // y += a*x
void xpby(std::span<const double> x, double b, std::span<double> y);   // y = x + b*y
void scale(double a, std::span<double> x);
void copy(std::span<const double> x, std::span<double> y);
void fill(std::span<double> x, double value);

// y = A x
void spmv(const SpdMatrix& A, std::span<const double> x, std::span<double> y);

// y = K x for the five-point stiffness stencil, without storing K.
void stencil_apply(const Grid& g, std::span<const double> x, std::span<double> y);

}  // namespace defopt::kernels

namespace defopt::ref {

double dot(std::span<const double> x, std::span<const double> y);
double nrm2_sq(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double b, std::span<double> y);
void spmv(const SpdMatrix& A, std::span<const double> x, std::span<double> y);
void stencil_apply(const Grid& g, std::span<const double> x, std::span<double> y);

}  // namespace defopt::ref

#endif
