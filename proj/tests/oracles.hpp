#pragma once

// Test-side reference implementations. They deliberately avoid the library's
// kernels so that agreement is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double hansen_pdf(double x, double nu, double lambda) {
  if (nu >= 1e7) {
    // Gaussian limit of the same construction
    const double c = 1.0 / std::sqrt(2.0 * M_PI);
    const double a = 4.0 * lambda * c;
    const double b = std::sqrt(1.0 + 3.0 * lambda * lambda - a * a);
    const double s = x < -a / b ? 1.0 - lambda : 1.0 + lambda;
    const double z = (b * x + a) / s;
    return b * c * std::exp(-0.5 * z * z);
  }
  const double c = std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) / std::sqrt(M_PI * (nu - 2.0));
  const double a = 4.0 * lambda * c * (nu - 2.0) / (nu - 1.0);
  const double b = std::sqrt(1.0 + 3.0 * lambda * lambda - a * a);
  const double s = x < -a / b ? 1.0 - lambda : 1.0 + lambda;
  const double z = (b * x + a) / s;
  return b * c * std::pow(1.0 + z * z / (nu - 2.0), -(nu + 1.0) / 2.0);
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Integral of g(x) * pdf(x) over the real line via x = x0 + sinh(u).
inline double moment(const std::function<double(double)>& g, double nu, double lambda, double x0 = 0.0) {
  auto f = [&](double u) {
    const double x = x0 + std::sinh(u);
    return g(x) * hansen_pdf(x, nu, lambda) * std::cosh(u);
  };
  return simpson(f, -48.0, 0.0, 400000) + simpson(f, 0.0, 48.0, 400000);
}

inline double cdf(double x, double nu, double lambda) {
  auto f = [&](double u) {
    const double t = x - std::exp(u);
    return hansen_pdf(t, nu, lambda) * std::exp(u);
  };
  return simpson(f, -40.0, 60.0, 200000);
}

/// Sup distance between the empirical CDF of `sample` and `F`.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& F) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = F(sample[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

/// Plain loop over periods: logistic weights on y_{sv, t-1}, blended means and
/// impact matrices, structural shocks by explicit inverse.
struct LogisticModel {
  std::vector<Eigen::VectorXd> phi;
  std::vector<Eigen::MatrixXd> a;  // p = 1
  std::vector<Eigen::MatrixXd> b;
  double c = 0.0;
  double gamma = 1.0;
  int switch_var = 0;
  Eigen::VectorXd nu;
  Eigen::VectorXd lambda;
};

inline double logistic_loglik(const LogisticModel& m, const Eigen::MatrixXd& y) {
  double ll = 0.0;
  for (Eigen::Index t = 1; t < y.rows(); ++t) {
    const Eigen::VectorXd lag = y.row(t - 1).transpose();
    const double w2 = 1.0 / (1.0 + std::exp(-m.gamma * (lag(m.switch_var) - m.c)));
    const double w1 = 1.0 - w2;
    const Eigen::VectorXd mu = w1 * (m.phi[0] + m.a[0] * lag) + w2 * (m.phi[1] + m.a[1] * lag);
    const Eigen::MatrixXd bt = w1 * m.b[0] + w2 * m.b[1];
    const Eigen::VectorXd e = bt.inverse() * (y.row(t).transpose() - mu);
    ll -= std::log(std::abs(bt.determinant()));
    for (Eigen::Index i = 0; i < e.size(); ++i) ll += std::log(hansen_pdf(e(i), m.nu(i), m.lambda(i)));
  }
  return ll;
}

}  // namespace oracle
