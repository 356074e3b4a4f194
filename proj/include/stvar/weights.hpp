#pragma once

#include <string>
#include <vector>

#include "stvar/linalg.hpp"

namespace stvar {

enum class WeightKind { logistic, threshold, exogenous };

std::string to_string(WeightKind kind);
WeightKind weight_kind_from_string(const std::string& name);

/// Lagged endogenous switching variable z_t = y_{variable, t - lag}.
/// `variable` is zero-based, `lag` is one-based.
struct SwitchVariable {
  Index variable = 0;
  Index lag = 1;
};

/// Static description of the weight function. Parameters live in WeightParams.
struct WeightSpec {
  WeightKind kind = WeightKind::logistic;
  Index regimes = 2;
  SwitchVariable switch_var;
  /// T x M table for exogenous weights; empty otherwise.
  MatrixXd exogenous;
};

/// Logistic: (location c, scale gamma). Threshold: ascending r_1 < ... < r_{M-1}.
struct WeightParams {
  double location = 0.0;
  double scale = 1.0;
  std::vector<double> thresholds;
};

/// Throws std::invalid_argument when params do not satisfy the spec's invariants.
void validate(const WeightSpec& spec, const WeightParams& params);

/// Logistic alpha_2 in an overflow-free form, clamped to {0, 1} beyond |x| = 700.
double logistic_weight(double z, double location, double scale);

/// Transition weights at one period. `lags` is p x d with row i-1 holding y_{t-i};
/// `t` is the zero-based observation index (used only for exogenous weights).
VectorXd eval_weights(const WeightSpec& spec, const WeightParams& params,
                      const Eigen::Ref<const MatrixXd>& lags, Index t);

/// Weights from the switching-variable value directly (endogenous kinds only).
VectorXd weights_from_switch(const WeightSpec& spec, const WeightParams& params, double z);

/// Weights for every observation given the switching series z (length T).
/// Exogenous specs ignore z and return the table's first T rows.
MatrixXd weight_path(const WeightSpec& spec, const WeightParams& params,
                     const Eigen::Ref<const VectorXd>& z, Index periods);

struct ExogenousReport {
  Index rank = 0;
  bool linearly_independent = false;
  bool strictly_positive_row = false;
  bool ok() const { return linearly_independent && strictly_positive_row; }
};

/// Checks that M linearly independent weight rows exist and that some row is
/// strictly positive in every regime.
ExogenousReport validate_exogenous(const Eigen::Ref<const MatrixXd>& table, double tol = 1e-10);

/// Rejects negative entries and rows whose sums drift from 1 by more than 1e-9;
/// smaller drifts are renormalized away.
MatrixXd normalize_exogenous(const Eigen::Ref<const MatrixXd>& table);

/// Threshold parameters equivalent to a logistic weight function as gamma -> inf.
/// Requires gamma_large >= 1e6.
WeightParams logistic_threshold_limit(const WeightParams& logistic, double gamma_large);

}  // namespace stvar
