#include "stvar/girf.hpp"

#include <algorithm>
#include <cmath>

#include "stvar/parallel.hpp"
#include "stvar/rng.hpp"

namespace stvar {

std::vector<History> select_histories(const ModelSpec& spec, const Params& params, const Dataset& data,
                                      Index regime, double threshold, Index shock) {
  if (regime < 0 || regime >= spec.M) throw std::invalid_argument("girf: regime index out of range");
  if (shock < 0 || shock >= spec.d) throw std::invalid_argument("girf: shock index out of range");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("girf: weight threshold outside [0, 1]");
  const Residuals res = residuals(spec, params, data);
  std::vector<History> out;
  for (Index t = 0; t < data.periods(); ++t) {
    if (res.weights(t, regime) > threshold) out.push_back(History{t, data.lags(t), res.structural(t, shock)});
  }
  if (out.empty()) {
    throw EmptySelectionError("girf: no history has alpha_" + std::to_string(regime + 1) + " above " +
                              std::to_string(threshold));
  }
  return out;
}

namespace {

void push_lag(MatrixXd& lags, const VectorXd& y) {
  for (Index i = lags.rows() - 1; i > 0; --i) lags.row(i) = lags.row(i - 1);
  lags.row(0) = y.transpose();
}

Index weight_period(const ModelSpec& spec, Index start, Index h) {
  if (spec.weights.kind != WeightKind::exogenous) return 0;
  return std::min(start + h, spec.weights.exogenous.rows() - 1);
}

}  // namespace

GirfPath girf_one(const ModelSpec& spec, const Params& params, const History& history, Index shock, Index horizon,
                  Index draws, std::uint64_t seed) {
  if (shock < 0 || shock >= spec.d) throw std::invalid_argument("girf: shock index out of range");
  if (horizon < 0) throw std::invalid_argument("girf: negative horizon");
  if (draws < 1) throw std::invalid_argument("girf: at least one draw required");
  if (history.lags.rows() != spec.p || history.lags.cols() != spec.d) throw ShapeError("girf: history must be p x d");
  const Index d = spec.d;
  const Index M = spec.M;
  const Index cols = d + M;
  const auto dists = shock_distributions(params);
  const Index start = std::max<Index>(history.period, 0);

  const VectorXd alpha0 = eval_weights(spec.weights, params.weights, history.lags, weight_period(spec, start, 0));
  const MatrixXd b0 = impact_matrix<double>(params, alpha0, start);
  const VectorXd mu0 = cond_mean<double>(alpha0, regime_means<double>(params, history.lags));

  GirfPath out;
  out.mean = MatrixXd::Zero(horizon + 1, cols);
  out.se = MatrixXd::Zero(horizon + 1, cols);
  out.mean.row(0).head(d) = (b0.col(shock) * history.delta).transpose();
  if (horizon == 0) return out;

  Rng rng(seed);
  MatrixXd sum = MatrixXd::Zero(horizon, cols);
  MatrixXd sumsq = MatrixXd::Zero(horizon, cols);
  MatrixXd diff(horizon, cols);
  VectorXd ea(d), eb(d), e(d);
  Index accepted = 0;
  const Index max_rejections = 100 * draws + 1000;
  while (accepted < draws) {
    for (Index i = 0; i < d; ++i) eb(i) = sample(dists[static_cast<std::size_t>(i)], rng);
    for (Index i = 0; i < d; ++i) ea(i) = sample(dists[static_cast<std::size_t>(i)], rng);
    ea(shock) = history.delta;
    MatrixXd lags_a = history.lags;
    MatrixXd lags_b = history.lags;
    push_lag(lags_a, mu0 + b0 * ea);
    push_lag(lags_b, mu0 + b0 * eb);
    bool ok = true;
    for (Index h = 1; h <= horizon && ok; ++h) {
      for (Index i = 0; i < d; ++i) e(i) = sample(dists[static_cast<std::size_t>(i)], rng);
      const Index period = weight_period(spec, start, h);
      const VectorXd alpha_a = eval_weights(spec.weights, params.weights, lags_a, period);
      const VectorXd alpha_b = eval_weights(spec.weights, params.weights, lags_b, period);
      const MatrixXd ba = blend_impact<double>(params, alpha_a);
      const MatrixXd bb = blend_impact<double>(params, alpha_b);
      if (is_singular(ba) || is_singular(bb)) {
        ok = false;
        break;
      }
      const VectorXd ya = cond_mean<double>(alpha_a, regime_means<double>(params, lags_a)) + ba * e;
      const VectorXd yb = cond_mean<double>(alpha_b, regime_means<double>(params, lags_b)) + bb * e;
      diff.row(h - 1).head(d) = (ya - yb).transpose();
      diff.row(h - 1).tail(M) = (alpha_a - alpha_b).transpose();
      push_lag(lags_a, ya);
      push_lag(lags_b, yb);
    }
    if (!ok) {
      if (++out.rejected > max_rejections) throw NumericError("girf: too many singular impact matrices", out.rejected);
      continue;
    }
    sum += diff;
    sumsq += diff.cwiseProduct(diff);
    ++accepted;
  }
  const double n = static_cast<double>(draws);
  const MatrixXd mean = sum / n;
  out.mean.bottomRows(horizon) = mean;
  if (draws > 1) {
    const MatrixXd var = ((sumsq - n * mean.cwiseProduct(mean)) / (n - 1.0)).cwiseMax(0.0);
    out.se.bottomRows(horizon) = (var / n).cwiseSqrt();
  }
  return out;
}

bool scale_path(MatrixXd& path, MatrixXd* se, Index variable, double size) {
  const double raw = path(0, variable);
  if (!(std::abs(raw) >= 1e-12)) return false;
  const double factor = size / raw;
  path *= factor;
  path(0, variable) = size;
  if (se) *se *= std::abs(factor);
  return true;
}

void accumulate_path(MatrixXd& path, const std::vector<Index>& columns) {
  for (Index c : columns) {
    for (Index h = 1; h < path.rows(); ++h) path(h, c) += path(h - 1, c);
  }
}

std::vector<MatrixXd> pointwise_quantiles(const std::vector<MatrixXd>& paths, const std::vector<double>& levels) {
  std::vector<MatrixXd> out;
  if (paths.empty()) return out;
  const Index rows = paths.front().rows();
  const Index cols = paths.front().cols();
  for (std::size_t l = 0; l < levels.size(); ++l) out.emplace_back(rows, cols);
  std::vector<double> values(paths.size());
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      for (std::size_t k = 0; k < paths.size(); ++k) values[k] = paths[k](i, j);
      std::sort(values.begin(), values.end());
      for (std::size_t l = 0; l < levels.size(); ++l) {
        const double pos = levels[l] * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        out[l](i, j) = values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
      }
    }
  }
  return out;
}

GirfResult girf_run(const GirfRequest& request, const ModelSpec& spec, const Params& params, const Dataset& data) {
  validate(spec, params);
  if (request.scale && (request.scale->first < 0 || request.scale->first >= spec.d)) {
    throw std::invalid_argument("girf: scaling variable out of range");
  }
  for (Index c : request.accumulate) {
    if (c < 0 || c >= spec.d) throw std::invalid_argument("girf: accumulated variable out of range");
  }
  GirfResult out;
  out.histories = request.histories.empty()
                      ? select_histories(spec, params, data, request.regime, request.threshold, request.shock)
                      : request.histories;
  const auto n = static_cast<Index>(out.histories.size());
  std::vector<GirfPath> raw(static_cast<std::size_t>(n));
  parallel_for(n, resolve_threads(request.threads), [&](Index k) {
    raw[static_cast<std::size_t>(k)] =
        girf_one(spec, params, out.histories[static_cast<std::size_t>(k)], request.shock, request.horizon,
                 request.draws, derive_seed(request.seed, static_cast<std::uint64_t>(k)));
  });

  for (Index i = 0; i < spec.d; ++i) {
    out.columns.push_back(static_cast<std::size_t>(i) < data.names.size() ? data.names[static_cast<std::size_t>(i)]
                                                                         : "y" + std::to_string(i + 1));
  }
  if (request.include_weights) {
    for (Index m = 0; m < spec.M; ++m) out.columns.push_back("alpha_" + std::to_string(m + 1));
  }
  const Index cols = static_cast<Index>(out.columns.size());
  for (Index k = 0; k < n; ++k) {
    GirfPath& g = raw[static_cast<std::size_t>(k)];
    if (request.scale && !scale_path(g.mean, &g.se, request.scale->first, request.scale->second)) {
      out.dropped.push_back(k);
      continue;
    }
    accumulate_path(g.mean, request.accumulate);
    out.paths.push_back(g.mean.leftCols(cols));
    out.path_history.push_back(k);
    out.se.push_back(g.se.leftCols(cols));
    out.rejected.push_back(g.rejected);
  }
  if (out.paths.empty()) throw EmptySelectionError("girf: every history has a negligible impact on the scaling variable");
  out.quantiles = pointwise_quantiles(out.paths, girf_quantile_levels());
  return out;
}

}  // namespace stvar
