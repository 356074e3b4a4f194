#include <algorithm>
#include <cmath>
#include <limits>

#include "stvar/estimate.hpp"

namespace stvar {

double default_min_contribution(const ModelSpec& spec) {
  const double d = static_cast<double>(spec.d);
  const double k = d + static_cast<double>(spec.p) * d * d + d * d;
  return 3.0 * k / d;
}

MatrixXd nls_coefficients(const Design& design, const Eigen::Ref<const MatrixXd>& weights, Index regimes) {
  const Index T = design.y.rows();
  const Index k = design.regressors.cols();
  MatrixXd z(T, regimes * k);
  for (Index m = 0; m < regimes; ++m) z.middleCols(m * k, k) = weights.col(m).asDiagonal() * design.regressors;
  return z.colPivHouseholderQr().solve(design.y);
}

namespace {

std::vector<double> linspace(double lo, double hi, Index n) {
  std::vector<double> out;
  for (Index i = 0; i < n; ++i) {
    out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

double sample_quantile(std::vector<double> sorted, double prob) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// All strictly ascending (M-1)-subsets of the candidate values.
void ascending_combinations(const std::vector<double>& values, Index count, std::size_t start,
                            std::vector<double>& current, std::vector<WeightParams>& out) {
  if (static_cast<Index>(current.size()) == count) {
    WeightParams wp;
    wp.thresholds = current;
    out.push_back(std::move(wp));
    return;
  }
  for (std::size_t i = start; i < values.size(); ++i) {
    if (!current.empty() && !(values[i] > current.back())) continue;
    current.push_back(values[i]);
    ascending_combinations(values, count, i + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<WeightParams> weight_grid(const ModelSpec& spec, const Design& design, const NlsConfig& cfg) {
  if (cfg.grid_points < 2) throw ConfigError("nls: at least two grid points per weight parameter");
  for (const auto& [lo, hi] : cfg.ranges) {
    if (!(lo <= hi)) throw ConfigError("nls: grid ranges must be ordered");
  }
  std::vector<WeightParams> grid;
  const Index n = cfg.grid_points;
  switch (spec.weights.kind) {
    case WeightKind::exogenous:
      grid.emplace_back();
      break;
    case WeightKind::logistic: {
      const auto c_range = cfg.ranges.size() > 0 ? cfg.ranges[0]
                                                 : std::make_pair(design.z.minCoeff(), design.z.maxCoeff());
      const auto g_range = cfg.ranges.size() > 1 ? cfg.ranges[1] : std::make_pair(0.1, 100.0);
      if (!(g_range.first > 0.0)) throw ConfigError("nls: gamma range must be positive");
      const auto cs = linspace(c_range.first, c_range.second, n);
      const auto log_gs = linspace(std::log(g_range.first), std::log(g_range.second), n);
      for (double c : cs) {
        for (double lg : log_gs) {
          WeightParams wp;
          wp.location = c;
          wp.scale = std::exp(lg);
          grid.push_back(wp);
        }
      }
      break;
    }
    case WeightKind::threshold: {
      if (spec.M == 1) {
        grid.emplace_back();
        break;
      }
      std::vector<double> values;
      if (!cfg.ranges.empty()) {
        values = linspace(cfg.ranges[0].first, cfg.ranges[0].second, n);
      } else {
        const std::vector<double> z(design.z.data(), design.z.data() + design.z.size());
        for (double prob : linspace(0.1, 0.9, n)) values.push_back(sample_quantile(z, prob));
      }
      values.erase(std::unique(values.begin(), values.end()), values.end());
      std::vector<double> current;
      ascending_combinations(values, spec.M - 1, 0, current, grid);
      break;
    }
  }
  return grid;
}

NlsResult step1_pnls(const ModelSpec& spec, const Dataset& data, const NlsConfig& nls, const PenaltyConfig& pen) {
  spec.validate();
  pen.validate();
  const Design design = make_design(spec, data);
  const Index T = design.y.rows();
  const Index free_ar = spec.M * spec.ar_coefficients_per_regime();
  if (T * spec.d <= free_ar) throw ConfigError("nls: too few observations for the autoregressive parameters");

  NlsResult out;
  out.min_contribution = nls.min_contribution.value_or(default_min_contribution(spec));
  const auto grid = weight_grid(spec, design, nls);
  out.grid_size = static_cast<Index>(grid.size());

  struct Candidate {
    Params params;
    double q;
    std::vector<VectorXd> moduli;
  };
  std::vector<Candidate> kept;
  Params params = default_params(spec);
  const Index k = design.regressors.cols();
  for (const auto& wp : grid) {
    params.weights = wp;
    const MatrixXd weights = weight_path(spec.weights, wp, design.z, T);
    const VectorXd mass = weights.colwise().sum().transpose();
    if ((mass.array() < out.min_contribution).any()) continue;
    const MatrixXd coef = nls_coefficients(design, weights, spec.M);
    if (!coef.allFinite()) continue;
    for (Index m = 0; m < spec.M; ++m) set_coefficients(params, m, coef.middleRows(m * k, k));
    const double q = (design.y - cond_mean_path(params, design, weights)).squaredNorm();
    std::vector<VectorXd> moduli;
    for (Index m = 0; m < spec.M; ++m) moduli.push_back(eigenvalue_moduli(companion(params, m)));
    kept.push_back(Candidate{params, q, std::move(moduli)});
  }
  out.screened = static_cast<Index>(kept.size());
  if (kept.empty()) {
    throw ConfigError("nls: no grid point gives every regime a weight mass of at least " +
                      std::to_string(out.min_contribution) + "; widen the weight-parameter ranges");
  }
  out.rss_hat = std::numeric_limits<double>::infinity();
  for (const auto& c : kept) out.rss_hat = std::min(out.rss_hat, c.q);
  std::size_t best = 0;
  double best_pq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double pq = pnls_objective(kept[i].q, out.rss_hat, kept[i].moduli, pen);
    if (pq < best_pq) {
      best_pq = pq;
      best = i;
    }
  }
  out.params = kept[best].params;
  out.q = kept[best].q;
  out.pq = best_pq;
  out.weights = weight_path(spec, out.params, design);
  out.residuals = design.y - cond_mean_path(out.params, design, out.weights);
  return out;
}

}  // namespace stvar
