#include "defopt/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace defopt {

Nonlinearity Nonlinearity::affine(double c0, double c1) {
  return Nonlinearity(Kind::affine, {c0, c1});
}

Nonlinearity Nonlinearity::shifted_cubic() {
  // (u-2)^3 = -8 + 12u - 6u^2 + u^3
  return Nonlinearity(Kind::shifted_cubic, {-8.0, 12.0, -6.0, 1.0});
}

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  return Nonlinearity(Kind::polynomial, std::move(coeffs));
}

double Nonlinearity::eval(double u) const {
  double s = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * u + *it;
  return s;
}

double Nonlinearity::deriv(double u) const {
  double s = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;)
    s = s * u + static_cast<double>(k) * coeffs_[k];
  return s;
}

std::vector<double> Nonlinearity::deriv_coeffs() const {
  if (coeffs_.size() <= 1) return {0.0};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return d;
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::affine:
      os << "affine(" << coeffs_[0] << ", " << coeffs_[1] << ")";
      break;
    case Kind::shifted_cubic:
      os << "shifted_cubic";
      break;
    case Kind::polynomial:
      os << "polynomial(";
      for (std::size_t k = 0; k < coeffs_.size(); ++k)
        os << (k ? "," : "") << coeffs_[k];
      os << ")";
      break;
  }
  return os.str();
}

namespace {

// Strips exactly-zero leading coefficients (our kinds construct them exactly).
std::vector<double> trimmed(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  return c;
}

// Is the polynomial bounded above on all of R?
bool bounded_above(const std::vector<double>& c) {
  const std::vector<double> t = trimmed(c);
  const std::size_t deg = t.size() - 1;
  if (deg == 0) return true;
  if (deg % 2 == 1) return false;  // odd degree escapes to +inf on one side
  return t.back() < 0.0;
}

}  // namespace

ExistenceReport check_existence_hypothesis(const Nonlinearity& phi, double l_slope,
                                           double l_intercept, const Interval& u_range,
                                           int samples) {
  if (samples < 2) throw std::invalid_argument("existence check needs at least 2 samples");

  // g(u) = (l(u) - phi(u)) * u as a polynomial: multiply by u = shift by one degree.
  std::vector<double> diff = phi.coeffs();
  for (double& c : diff) c = -c;
  diff[0] += l_intercept;
  if (diff.size() < 2) diff.resize(2, 0.0);
  diff[1] += l_slope;
  std::vector<double> g(diff.size() + 1, 0.0);
  for (std::size_t k = 0; k < diff.size(); ++k) g[k + 1] = diff[k];

  ExistenceReport report;
  report.holds = bounded_above(g);

  auto eval_g = [&](double u) {
    return (l_intercept + l_slope * u - phi.eval(u)) * u;
  };
  double max_value = eval_g(u_range.lo);
  for (int s = 1; s < samples; ++s) {
    const double u = u_range.lo + (u_range.hi - u_range.lo) * s / (samples - 1);
    max_value = std::max(max_value, eval_g(u));
  }
  report.max_value = max_value;
  return report;
}

bool check_monotone(const Nonlinearity& phi, const Interval& u_range, int samples) {
  if (samples < 2) throw std::invalid_argument("monotonicity check needs at least 2 samples");
  for (int s = 0; s < samples; ++s) {
    const double u = u_range.lo + (u_range.hi - u_range.lo) * s / (samples - 1);
    if (phi.deriv(u) < 0.0) return false;
  }
  return true;
}

}  // namespace defopt
