#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stvar {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hansen's skewed t-distribution standardized to zero mean and unit variance.
///
/// The derived constants a, b, c are computed once at construction from
/// (nu, lambda); the object is immutable so they cannot go stale. Degrees of
/// freedom at or above kNuCap are treated as the Gaussian limit.
class SkewTParams {
 public:
  static constexpr double kNuCap = 1e7;

  SkewTParams(double nu, double lambda);

  double nu() const noexcept { return nu_; }
  double lambda() const noexcept { return lambda_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  /// Point where the density switches between its left and right branches.
  double knot() const noexcept { return -a_ / b_; }
  bool gaussian_limit() const noexcept { return gaussian_; }

  /// Hot-path log density; no validation.
  double log_pdf(double x) const noexcept {
    const double scale = x < knot_ ? inv_left_ : inv_right_;
    const double z = (b_ * x + a_) * scale;
    if (gaussian_) return log_bc_ - 0.5 * z * z;
    return log_bc_ + exponent_ * std::log1p(z * z * inv_nu_minus_2_);
  }

 private:
  double nu_;
  double lambda_;
  double a_ = 0.0;
  double b_ = 1.0;
  double c_ = 0.0;
  bool gaussian_ = false;
  double knot_ = 0.0;
  double log_bc_ = 0.0;
  double inv_left_ = 1.0;
  double inv_right_ = 1.0;
  double inv_nu_minus_2_ = 0.0;
  double exponent_ = 0.0;
};

double pdf(double x, const SkewTParams& p);
double log_pdf(double x, const SkewTParams& p);
double cdf(double x, const SkewTParams& p);
/// Inverse CDF; throws std::domain_error unless 0 < u < 1.
double quantile(double u, const SkewTParams& p);

/// Uniform on the open interval (0, 1) from 53 random bits.
template <typename Rng>
double open_uniform(Rng& rng) {
  static_assert(sizeof(typename Rng::result_type) >= 8, "needs a 64-bit engine");
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Draws by inverse CDF, so results are reproducible for a given engine state.
template <typename Rng>
double sample(const SkewTParams& p, Rng& rng) {
  return quantile(open_uniform(rng), p);
}

template <typename Rng>
std::vector<double> sample(std::size_t n, const SkewTParams& p, Rng& rng) {
  std::vector<double> out(n);
  for (auto& x : out) x = sample(p, rng);
  return out;
}

}  // namespace stvar
