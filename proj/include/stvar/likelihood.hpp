#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "stvar/model.hpp"
#include "stvar/optim.hpp"

namespace stvar {

/// Stability penalty tuning: penalization starts at modulus 1 - eta, strength kappa.
struct PenaltyConfig {
  double eta = 0.05;
  double kappa = 0.2;
  void validate() const;
};

inline constexpr double kRejected = -std::numeric_limits<double>::infinity();

/// Log-likelihood value, or -inf with the first period where B_{y,t} was singular.
struct LoglikValue {
  double value = kRejected;
  Index singular_period = -1;
  bool ok() const { return value > kRejected; }
};

/// sum_m sum_i max{0, |rho_i(companion_m)| - (1 - eta)}^2 over all dp moduli.
double stability_excess(const std::vector<VectorXd>& moduli, double eta);
double stability_excess(const Params& params, double eta);

/// kappa * T * d * stability_excess.
double penalty(const ModelSpec& spec, const Params& params, Index periods, const PenaltyConfig& cfg);

/// sum_t [ -log|det B_{y,t}| + sum_i log st(e_it; nu_i, lambda_i) ].
LoglikValue loglik(const ModelSpec& spec, const Params& params, const Dataset& data);
double pen_loglik(const ModelSpec& spec, const Params& params, const Dataset& data, const PenaltyConfig& cfg);

/// Structural part of the likelihood with reduced-form residuals u (T x d)
/// and weights (T x M) held fixed.
LoglikValue structural_loglik(const Eigen::Ref<const MatrixXd>& u, const Eigen::Ref<const MatrixXd>& weights,
                              const std::vector<MatrixXd>& impact, const Eigen::Ref<const VectorXd>& nu,
                              const Eigen::Ref<const VectorXd>& lambda);

/// Caches the design matrices of one dataset for repeated evaluation.
class Objective {
 public:
  Objective(ModelSpec spec, const Dataset& data, PenaltyConfig cfg = {});

  const ModelSpec& spec() const { return spec_; }
  const Design& design() const { return design_; }
  const PenaltyConfig& penalty_config() const { return cfg_; }
  Index periods() const { return design_.y.rows(); }

  /// Returns -inf (never throws) for invalid parameter points.
  LoglikValue loglik(const Params& params) const;
  double penalty(const Params& params) const;
  double pen_loglik(const Params& params) const;

 private:
  ModelSpec spec_;
  Design design_;
  PenaltyConfig cfg_;
};

/// Q = sum_t u_t' u_t with u_t = y_t - sum_m alpha_{m,t} mu_{m,t}.
double nls_objective(const ModelSpec& spec, const Params& params, const Dataset& data);

/// PQ = Q + kappa * rss_hat * stability_excess(moduli).
double pnls_objective(double q, double rss_hat, const std::vector<VectorXd>& moduli, const PenaltyConfig& cfg);

/// Which parameter blocks are free in an optimization.
struct FreeBlocks {
  bool ar = true;       // intercepts and AR matrices
  bool impact = true;   // B_m entries
  bool weights = true;  // logistic (c, log gamma); other kinds have none
  bool shape = true;    // log(nu - 2), atanh(lambda)
};

/// Maps parameters to unconstrained coordinates: B entries as-is,
/// nu = 2 + exp(s), lambda = tanh(r), logistic gamma = exp(g).
class ParamCoder {
 public:
  ParamCoder(const ModelSpec& spec, FreeBlocks blocks = {});

  Index size() const { return size_; }
  VectorXd encode(const Params& params) const;
  /// Fills the free blocks from x, copying everything else from base.
  Params decode(const Eigen::Ref<const VectorXd>& x, const Params& base) const;

 private:
  ModelSpec spec_;
  FreeBlocks blocks_;
  Index size_ = 0;
};

/// Gradient of the penalized log-likelihood over the free coordinates of `coder`.
GradientResult loglik_gradient(const Objective& objective, const ParamCoder& coder, const Params& params);

}  // namespace stvar
