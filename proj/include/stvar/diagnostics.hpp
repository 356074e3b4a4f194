#pragma once

#include <vector>

#include "stvar/model.hpp"

namespace stvar {

/// Sample auto- and cross-correlations with global means and the biased
/// denominator T. corr[k](i, j) = corr(x_{i,t}, x_{j,t-k}).
struct CorrReport {
  Index max_lag = 0;
  std::vector<MatrixXd> corr;  // max_lag + 1 matrices, d x d
  double band = 0.0;           // 1.96 / sqrt(T)
  std::vector<bool> constant;  // per series; correlations involving it are NaN
};

CorrReport acf_ccf(const Eigen::Ref<const MatrixXd>& series, Index max_lag);

/// Structural shocks e_t = B_{y,t}^{-1} u_t.
MatrixXd standardized_residuals(const ModelSpec& spec, const Params& params, const Dataset& data);

struct QqPoint {
  Index k = 0;  // one-based order statistic index
  double theoretical = 0.0;
  double empirical = 0.0;
};

/// Order statistics against skewed-t quantiles at (k - 0.5) / T.
std::vector<QqPoint> qq_data(const Eigen::Ref<const VectorXd>& shocks, const SkewTParams& params);

}  // namespace stvar
