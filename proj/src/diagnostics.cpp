#include "stvar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stvar {

CorrReport acf_ccf(const Eigen::Ref<const MatrixXd>& series, Index max_lag) {
  const Index T = series.rows();
  const Index d = series.cols();
  if (max_lag < 0 || T <= max_lag) throw std::invalid_argument("acf: need more observations than lags");
  CorrReport out;
  out.max_lag = max_lag;
  out.band = 1.96 / std::sqrt(static_cast<double>(T));
  const MatrixXd centered = series.rowwise() - series.colwise().mean();
  const VectorXd c0 = centered.colwise().squaredNorm().transpose() / static_cast<double>(T);
  for (Index i = 0; i < d; ++i) out.constant.push_back(!(c0(i) > 0.0));
  for (Index k = 0; k <= max_lag; ++k) {
    MatrixXd c = centered.bottomRows(T - k).transpose() * centered.topRows(T - k) / static_cast<double>(T);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        const auto flagged = out.constant[static_cast<std::size_t>(i)] || out.constant[static_cast<std::size_t>(j)];
        c(i, j) = flagged ? std::numeric_limits<double>::quiet_NaN() : c(i, j) / std::sqrt(c0(i) * c0(j));
      }
    }
    out.corr.push_back(std::move(c));
  }
  return out;
}

MatrixXd standardized_residuals(const ModelSpec& spec, const Params& params, const Dataset& data) {
  return residuals(spec, params, data).structural;
}

std::vector<QqPoint> qq_data(const Eigen::Ref<const VectorXd>& shocks, const SkewTParams& params) {
  const Index T = shocks.size();
  if (T < 10) throw std::invalid_argument("qq: at least 10 observations required");
  std::vector<double> sorted(shocks.data(), shocks.data() + T);
  std::sort(sorted.begin(), sorted.end());
  std::vector<QqPoint> out;
  out.reserve(static_cast<std::size_t>(T));
  for (Index k = 1; k <= T; ++k) {
    const double prob = (static_cast<double>(k) - 0.5) / static_cast<double>(T);
    out.push_back(QqPoint{k, quantile(prob, params), sorted[static_cast<std::size_t>(k - 1)]});
  }
  return out;
}

}  // namespace stvar
