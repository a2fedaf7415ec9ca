#ifndef DEFOPT_NONLINEARITY_HPP
#define DEFOPT_NONLINEARITY_HPP

#include <string>
#include <vector>

namespace defopt {

// Reaction term phi in the state law -div(grad u + grad w) + phi(u) = v.
// All supported kinds are polynomial, which keeps the existence-
// hypothesis sign analysis exact.
class Nonlinearity {
 public:
  enum class Kind { affine, shifted_cubic, polynomial };

  static Nonlinearity affine(double c0, double c1);
  static Nonlinearity shifted_cubic();  // phi(u) = (u-2)^3
  static Nonlinearity polynomial(std::vector<double> coeffs);  // sum c_k u^k
  static Nonlinearity zero() { return affine(0.0, 0.0); }

  Kind kind() const { return kind_; }
  bool is_affine() const { return kind_ == Kind::affine; }

  double eval(double u) const;
  double deriv(double u) const;

  // Monomial coefficients, constant term first.
  const std::vector<double>& coeffs() const { return coeffs_; }
  // Coefficients of phi', one degree lower.
  std::vector<double> deriv_coeffs() const;

  std::string describe() const;

 private:
  Nonlinearity(Kind k, std::vector<double> c) : kind_(k), coeffs_(std::move(c)) {}
  Kind kind_;
  std::vector<double> coeffs_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ExistenceReport {
  bool holds = false;
  double max_value = 0.0;  // sampled supremum of (l(u)-phi(u))*u
};

// Checks the coercivity hypothesis (l(u)-phi(u))*u <= M for the affine
// witness l(u) = l_intercept + l_slope*u: samples the product on the
// range and confirms boundedness at infinity by the sign of the leading
// coefficient.
ExistenceReport check_existence_hypothesis(const Nonlinearity& phi,
                                           double l_slope, double l_intercept,
                                           const Interval& u_range, int samples);

// Sufficient sampled check for monotonicity: phi' >= 0 on the range.
bool check_monotone(const Nonlinearity& phi, const Interval& u_range, int samples);

}  // namespace defopt

#endif
