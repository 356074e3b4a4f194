#include "stvar/dist.hpp"

#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace stvar {
namespace {

// CDF and quantile of the unit-variance t-distribution (or the standard normal
// in the Gaussian limit).
double standardized_cdf(double z, const SkewTParams& p) {
  if (p.gaussian_limit()) return boost::math::cdf(boost::math::normal_distribution<double>(), z);
  const double nu = p.nu();
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu),
                          z * std::sqrt(nu / (nu - 2.0)));
}

double standardized_quantile(double u, const SkewTParams& p) {
  if (p.gaussian_limit()) return boost::math::quantile(boost::math::normal_distribution<double>(), u);
  const double nu = p.nu();
  return boost::math::quantile(boost::math::students_t_distribution<double>(nu), u) *
         std::sqrt((nu - 2.0) / nu);
}

}  // namespace

SkewTParams::SkewTParams(double nu, double lambda) : nu_(nu), lambda_(lambda) {
  if (!(nu > 2.0)) throw ParameterError("skewed t: nu must exceed 2, got " + std::to_string(nu));
  if (!(std::abs(lambda) < 1.0)) {
    throw ParameterError("skewed t: lambda must lie in (-1, 1), got " + std::to_string(lambda));
  }
  gaussian_ = nu >= kNuCap;
  if (gaussian_) {
    c_ = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    a_ = 4.0 * lambda * c_;
  } else {
    c_ = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                  0.5 * std::log(std::numbers::pi * (nu - 2.0)));
    a_ = 4.0 * lambda * c_ * (nu - 2.0) / (nu - 1.0);
    inv_nu_minus_2_ = 1.0 / (nu - 2.0);
    exponent_ = -0.5 * (nu + 1.0);
  }
  b_ = std::sqrt(1.0 + 3.0 * lambda * lambda - a_ * a_);
  knot_ = -a_ / b_;
  log_bc_ = std::log(b_ * c_);
  inv_left_ = 1.0 / (1.0 - lambda);
  inv_right_ = 1.0 / (1.0 + lambda);
}

double log_pdf(double x, const SkewTParams& p) { return p.log_pdf(x); }

double pdf(double x, const SkewTParams& p) { return std::exp(p.log_pdf(x)); }

// Left of the knot the density is b * g((b x + a) / (1 - lambda)) with g the
// unit-variance t density, so it integrates to (1 - lambda) * G(z); the right
// branch carries the remaining (1 + lambda) / 2 of mass.
double cdf(double x, const SkewTParams& p) {
  const double lambda = p.lambda();
  if (x < p.knot()) {
    const double z = (p.b() * x + p.a()) / (1.0 - lambda);
    return (1.0 - lambda) * standardized_cdf(z, p);
  }
  const double z = (p.b() * x + p.a()) / (1.0 + lambda);
  return 0.5 * (1.0 - lambda) + (1.0 + lambda) * (standardized_cdf(z, p) - 0.5);
}

double quantile(double u, const SkewTParams& p) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("skewed t quantile: u must lie in (0, 1)");
  const double lambda = p.lambda();
  const double left_mass = 0.5 * (1.0 - lambda);
  if (u < left_mass) {
    const double z = standardized_quantile(u / (1.0 - lambda), p);
    return ((1.0 - lambda) * z - p.a()) / p.b();
  }
  const double z = standardized_quantile(0.5 + (u - left_mass) / (1.0 + lambda), p);
  return ((1.0 + lambda) * z - p.a()) / p.b();
}

}  // namespace stvar
