#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stvar/dist.hpp"
#include "stvar/linalg.hpp"
#include "stvar/weights.hpp"

namespace stvar {

/// Static shape of an STVAR model: d variables, AR order p, M regimes.
struct ModelSpec {
  Index d = 2;
  Index p = 1;
  Index M = 2;
  WeightSpec weights;

  /// Throws std::invalid_argument on inconsistent dimensions.
  void validate() const;
  Index ar_coefficients_per_regime() const { return d + d * d * p; }
};

/// Regime intercepts phi_m, AR matrices A_{m,i}, impact matrices B_m, weight
/// parameters, and per-shock degrees of freedom and skewness.
template <typename Scalar>
struct BasicParams {
  std::vector<Vector<Scalar>> phi;              // [M], each d
  std::vector<std::vector<Matrix<Scalar>>> ar;  // [M][p], each d x d
  std::vector<Matrix<Scalar>> impact;           // [M], each d x d
  WeightParams weights;
  Vector<Scalar> nu;      // d, each > 2
  Vector<Scalar> lambda;  // d, each in (-1, 1)

  Index dim() const { return nu.size(); }
  Index regimes() const { return static_cast<Index>(phi.size()); }
  Index order() const { return ar.empty() ? 0 : static_cast<Index>(ar.front().size()); }
};

using Params = BasicParams<double>;

/// Zero AR parts, identity impact matrices, nu = 10, lambda = 0.
Params default_params(const ModelSpec& spec);

/// Throws std::invalid_argument on shape mismatch, invalid shock parameters,
/// invalid weight parameters, or a singular regime impact matrix.
void validate(const ModelSpec& spec, const Params& params);

std::vector<SkewTParams> shock_distributions(const Params& params);

/// Observed series: p presample rows y_{-p+1..0} followed by T rows y_{1..T},
/// both in chronological order.
struct Dataset {
  MatrixXd presample;
  MatrixXd body;
  std::vector<std::string> names;

  Index periods() const { return body.rows(); }
  Index dim() const { return body.cols(); }
  /// Presample and body stacked into one (p + T) x d matrix.
  MatrixXd stacked() const;
  /// Lag vector for zero-based observation t: p x d, row i-1 holds y_{t-i}.
  MatrixXd lags(Index t) const;
  /// Splits a chronological block whose first p rows are presample.
  static Dataset from_rows(const MatrixXd& rows, Index p, std::vector<std::string> names = {});
};

/// Raised when B_{y,t} is singular; carries the period and weights.
class SingularImpactError : public std::runtime_error {
 public:
  SingularImpactError(Index period, VectorXd weights);
  Index period() const noexcept { return period_; }
  const VectorXd& weights() const noexcept { return weights_; }

 private:
  Index period_;
  VectorXd weights_;
};

/// mu_{m,t} = phi_m + sum_i A_{m,i} y_{t-i} for each regime.
template <typename Scalar>
std::vector<Vector<Scalar>> regime_means(const BasicParams<Scalar>& params,
                                         const Eigen::Ref<const Matrix<Scalar>>& lags) {
  if (lags.rows() != params.order() || lags.cols() != params.dim()) {
    throw ShapeError("regime_means: lag vector must be p x d");
  }
  std::vector<Vector<Scalar>> means;
  means.reserve(params.phi.size());
  for (std::size_t m = 0; m < params.phi.size(); ++m) {
    Vector<Scalar> mu = params.phi[m];
    for (std::size_t i = 0; i < params.ar[m].size(); ++i) {
      mu.noalias() += params.ar[m][i] * lags.row(static_cast<Index>(i)).transpose();
    }
    means.push_back(std::move(mu));
  }
  return means;
}

/// Convex combination sum_m alpha_m mu_m.
template <typename Scalar>
Vector<Scalar> cond_mean(const Eigen::Ref<const Vector<Scalar>>& weights,
                         const std::vector<Vector<Scalar>>& means) {
  if (static_cast<std::size_t>(weights.size()) != means.size() || means.empty()) {
    throw ShapeError("cond_mean: one weight per regime mean required");
  }
  Vector<Scalar> out = Vector<Scalar>::Zero(means.front().size());
  for (std::size_t m = 0; m < means.size(); ++m) out += weights(static_cast<Index>(m)) * means[m];
  return out;
}

/// B_{y,t} = sum_m alpha_m B_m without a singularity check.
template <typename Scalar>
Matrix<Scalar> blend_impact(const BasicParams<Scalar>& params,
                            const Eigen::Ref<const Vector<Scalar>>& weights) {
  if (static_cast<std::size_t>(weights.size()) != params.impact.size()) {
    throw ShapeError("impact_matrix: one weight per regime required");
  }
  Matrix<Scalar> out = Matrix<Scalar>::Zero(params.dim(), params.dim());
  for (std::size_t m = 0; m < params.impact.size(); ++m) {
    out += weights(static_cast<Index>(m)) * params.impact[m];
  }
  return out;
}

/// B_{y,t}; throws SingularImpactError (tagged with `period`) when singular.
template <typename Scalar>
Matrix<Scalar> impact_matrix(const BasicParams<Scalar>& params,
                             const Eigen::Ref<const Vector<Scalar>>& weights, Index period = -1) {
  Matrix<Scalar> out = blend_impact(params, weights);
  if (is_singular(out)) throw SingularImpactError(period, weights.template cast<double>());
  return out;
}

/// Omega_{y,t} = sum_m alpha_m^2 B_m B_m' + sum_{m != n} alpha_m alpha_n B_m B_n'.
template <typename Scalar>
Matrix<Scalar> cond_cov(const BasicParams<Scalar>& params,
                        const Eigen::Ref<const Vector<Scalar>>& weights, Index period = -1) {
  impact_matrix(params, weights, period);
  const Index d = params.dim();
  Matrix<Scalar> omega = Matrix<Scalar>::Zero(d, d);
  for (std::size_t m = 0; m < params.impact.size(); ++m) {
    for (std::size_t n = 0; n < params.impact.size(); ++n) {
      omega += weights(static_cast<Index>(m)) * weights(static_cast<Index>(n)) *
               (params.impact[m] * params.impact[n].transpose());
    }
  }
  return omega;
}

/// [phi_m'; A_{m,1}'; ...; A_{m,p}'] so that mu_{m,t}' = x_t' * coef, with
/// x_t = (1, y_{t-1}', ..., y_{t-p}')'.
MatrixXd coefficient_matrix(const Params& params, Index m);
void set_coefficients(Params& params, Index m, const Eigen::Ref<const MatrixXd>& coef);

/// Precomputed per-dataset quantities shared by every objective evaluation.
struct Design {
  MatrixXd y;           // T x d
  MatrixXd regressors;  // T x (1 + dp), rows x_t'
  VectorXd z;           // switching variable per period (empty for exogenous weights)
};

Design make_design(const ModelSpec& spec, const Dataset& data);

/// alpha_{m,t} for all periods (T x M).
MatrixXd weight_path(const ModelSpec& spec, const Params& params, const Design& design);

/// Conditional means mu_{y,t} for all periods given a weight path (T x d).
MatrixXd cond_mean_path(const Params& params, const Design& design,
                        const Eigen::Ref<const MatrixXd>& weights);

struct SimulationOptions {
  Index periods = 0;
  std::uint64_t seed = 1;
  Index burnin = 1000;
  /// p x d chronological start values; burn-in is used when absent.
  std::optional<MatrixXd> presample;
};

struct Simulation {
  Dataset data;
  MatrixXd shocks;              // T x d, e_t
  MatrixXd weights;             // T x M, alpha_{m,t}
  std::vector<MatrixXd> impact; // T entries, B_{y,t}
};

/// y_t = sum_m alpha_{m,t} mu_{m,t} + B_{y,t} e_t with skewed-t shocks drawn by
/// inverse CDF. Throws SingularImpactError with the offending period.
Simulation simulate(const ModelSpec& spec, const Params& params, const SimulationOptions& options);

struct Residuals {
  MatrixXd reduced;     // T x d, u_t
  MatrixXd structural;  // T x d, e_t = B_{y,t}^{-1} u_t
  MatrixXd weights;     // T x M
};

Residuals residuals(const ModelSpec& spec, const Params& params, const Dataset& data);

/// (I - sum_i A_{m,i})^{-1} phi_m.
VectorXd unconditional_mean(const Params& params, Index m);

}  // namespace stvar
