#include "stvar/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace stvar {

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::logistic: return "logistic";
    case WeightKind::threshold: return "threshold";
    case WeightKind::exogenous: return "exogenous";
  }
  return "unknown";
}

WeightKind weight_kind_from_string(const std::string& name) {
  if (name == "logistic") return WeightKind::logistic;
  if (name == "threshold") return WeightKind::threshold;
  if (name == "exogenous") return WeightKind::exogenous;
  throw std::invalid_argument("unknown weight kind '" + name + "'");
}

void validate(const WeightSpec& spec, const WeightParams& params) {
  if (spec.regimes < 1) throw std::invalid_argument("weights: at least one regime required");
  switch (spec.kind) {
    case WeightKind::logistic:
      if (spec.regimes != 2) throw std::invalid_argument("weights: logistic weights require M = 2");
      if (!(params.scale > 0.0) || !std::isfinite(params.scale)) {
        throw std::invalid_argument("weights: logistic scale gamma must be positive");
      }
      if (!std::isfinite(params.location)) throw std::invalid_argument("weights: non-finite location");
      break;
    case WeightKind::threshold:
      if (static_cast<Index>(params.thresholds.size()) != spec.regimes - 1) {
        throw std::invalid_argument("weights: threshold model needs M - 1 thresholds");
      }
      for (std::size_t i = 1; i < params.thresholds.size(); ++i) {
        if (!(params.thresholds[i - 1] < params.thresholds[i])) {
          throw std::invalid_argument("weights: thresholds must be strictly ascending");
        }
      }
      break;
    case WeightKind::exogenous:
      if (spec.exogenous.cols() != spec.regimes) {
        throw std::invalid_argument("weights: exogenous table must have M columns");
      }
      if ((spec.exogenous.array() < 0.0).any()) {
        throw std::invalid_argument("weights: exogenous weights must be nonnegative");
      }
      if (((spec.exogenous.rowwise().sum().array() - 1.0).abs() > 1e-12).any()) {
        throw std::invalid_argument("weights: exogenous rows must sum to one");
      }
      break;
  }
}

double logistic_weight(double z, double location, double scale) {
  const double x = scale * (z - location);
  if (x > 700.0) return 1.0;
  if (x < -700.0) return 0.0;
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

VectorXd weights_from_switch(const WeightSpec& spec, const WeightParams& params, double z) {
  VectorXd alpha = VectorXd::Zero(spec.regimes);
  switch (spec.kind) {
    case WeightKind::logistic: {
      const double a2 = logistic_weight(z, params.location, params.scale);
      alpha(1) = a2;
      alpha(0) = 1.0 - a2;
      break;
    }
    case WeightKind::threshold: {
      // Half-open intervals (r_{m-1}, r_m]: a value on a threshold stays in the lower regime.
      Index m = 0;
      while (m < spec.regimes - 1 && z > params.thresholds[static_cast<std::size_t>(m)]) ++m;
      alpha(m) = 1.0;
      break;
    }
    case WeightKind::exogenous:
      throw std::invalid_argument("weights_from_switch: exogenous weights have no switching variable");
  }
  return alpha;
}

VectorXd eval_weights(const WeightSpec& spec, const WeightParams& params,
                      const Eigen::Ref<const MatrixXd>& lags, Index t) {
  if (spec.kind == WeightKind::exogenous) {
    if (t < 0 || t >= spec.exogenous.rows()) {
      throw std::out_of_range("eval_weights: period " + std::to_string(t) +
                              " outside exogenous table of " +
                              std::to_string(spec.exogenous.rows()) + " rows");
    }
    VectorXd alpha = spec.exogenous.row(t).transpose();
    alpha(spec.regimes - 1) = 1.0 - alpha.head(spec.regimes - 1).sum();
    return alpha;
  }
  if (spec.switch_var.lag < 1 || spec.switch_var.lag > lags.rows() ||
      spec.switch_var.variable < 0 || spec.switch_var.variable >= lags.cols()) {
    throw ShapeError("eval_weights: switching variable outside the lag vector");
  }
  return weights_from_switch(spec, params, lags(spec.switch_var.lag - 1, spec.switch_var.variable));
}

MatrixXd weight_path(const WeightSpec& spec, const WeightParams& params,
                     const Eigen::Ref<const VectorXd>& z, Index periods) {
  MatrixXd alpha(periods, spec.regimes);
  if (spec.kind == WeightKind::exogenous) {
    if (spec.exogenous.rows() < periods) {
      throw std::out_of_range("weight_path: exogenous table has " +
                              std::to_string(spec.exogenous.rows()) + " rows, need " +
                              std::to_string(periods));
    }
    alpha = spec.exogenous.topRows(periods);
    alpha.col(spec.regimes - 1) =
        (1.0 - alpha.leftCols(spec.regimes - 1).rowwise().sum().array()).matrix();
    return alpha;
  }
  if (z.size() < periods) throw ShapeError("weight_path: switching series too short");
  if (spec.kind == WeightKind::logistic) {
    for (Index t = 0; t < periods; ++t) {
      const double a2 = logistic_weight(z(t), params.location, params.scale);
      alpha(t, 1) = a2;
      alpha(t, 0) = 1.0 - a2;
    }
    return alpha;
  }
  for (Index t = 0; t < periods; ++t) alpha.row(t) = weights_from_switch(spec, params, z(t)).transpose();
  return alpha;
}

ExogenousReport validate_exogenous(const Eigen::Ref<const MatrixXd>& table, double tol) {
  ExogenousReport report;
  if (table.size() == 0) return report;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(table);
  qr.setThreshold(tol);
  report.rank = qr.rank();
  report.linearly_independent = report.rank == table.cols();
  for (Index t = 0; t < table.rows(); ++t) {
    if ((table.row(t).array() > 0.0).all()) {
      report.strictly_positive_row = true;
      break;
    }
  }
  return report;
}

MatrixXd normalize_exogenous(const Eigen::Ref<const MatrixXd>& table) {
  if ((table.array() < 0.0).any()) throw std::invalid_argument("exogenous weights: negative entry");
  MatrixXd out = table;
  for (Index t = 0; t < out.rows(); ++t) {
    const double s = out.row(t).sum();
    if (std::abs(s - 1.0) > 1e-9) {
      throw std::invalid_argument("exogenous weights: row " + std::to_string(t + 1) +
                                  " sums to " + std::to_string(s));
    }
    out.row(t) /= s;
  }
  return out;
}

WeightParams logistic_threshold_limit(const WeightParams& logistic, double gamma_large) {
  if (!(gamma_large >= 1e6)) {
    throw std::invalid_argument("logistic_threshold_limit: gamma must be at least 1e6");
  }
  WeightParams out;
  out.location = logistic.location;
  out.scale = gamma_large;
  out.thresholds = {logistic.location};
  return out;
}

}  // namespace stvar
