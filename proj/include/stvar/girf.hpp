#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stvar/model.hpp"

namespace stvar {

class EmptySelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A length-p history y_{t-1}, ..., y_{t-p} with the recovered shock at t.
struct History {
  Index period = -1;  // zero-based observation index t, -1 if supplied externally
  MatrixXd lags;      // p x d, row i-1 = y_{t-i}
  double delta = 0.0;
};

/// Histories whose transition weight alpha_{m,t} exceeds `threshold`, each
/// paired with the recovered structural shock e_{shock,t}.
std::vector<History> select_histories(const ModelSpec& spec, const Params& params, const Dataset& data,
                                      Index regime, double threshold, Index shock);

struct GirfPath {
  MatrixXd mean;  // (H+1) x (d + M); columns y_1..y_d then alpha_1..alpha_M
  MatrixXd se;    // Monte Carlo standard errors, zero at h = 0
  Index rejected = 0;
};

/// Monte Carlo GIRF for one history. Branch A fixes e_{shock,t} = delta at
/// impact and draws the other components; branch B draws all components;
/// both branches share the innovations at h >= 1. The h = 0 row is the
/// exact impact response.
GirfPath girf_one(const ModelSpec& spec, const Params& params, const History& history, Index shock, Index horizon,
                  Index draws, std::uint64_t seed);

struct GirfRequest {
  Index shock = 0;  // zero-based
  Index horizon = 36;
  Index draws = 1000;
  /// Explicit histories; when empty they are selected from the data.
  std::vector<History> histories;
  Index regime = 0;
  double threshold = 0.75;
  /// Optional scaling: (zero-based variable, impact size).
  std::optional<std::pair<Index, double>> scale;
  std::vector<Index> accumulate;  // zero-based variables
  bool include_weights = true;
  std::uint64_t seed = 1;
  Index threads = 1;
};

inline const std::vector<double>& girf_quantile_levels() {
  static const std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
  return levels;
}

struct GirfResult {
  std::vector<History> histories;
  std::vector<MatrixXd> paths;  // per surviving history
  std::vector<Index> path_history;  // index into histories for each path
  std::vector<MatrixXd> se;     // before accumulation
  std::vector<Index> rejected;
  std::vector<Index> dropped;   // history indices with negligible raw impact
  std::vector<MatrixXd> quantiles;  // one (H+1) x cols matrix per level
  std::vector<std::string> columns;
};

/// Multiplies each path so that column `variable` at h = 0 equals `size`.
/// Returns false (leaving the path untouched) when the raw impact is below 1e-12.
bool scale_path(MatrixXd& path, MatrixXd* se, Index variable, double size);

/// Cumulative sums over h of the listed columns.
void accumulate_path(MatrixXd& path, const std::vector<Index>& columns);

/// Pointwise empirical quantiles (linear interpolation) across paths.
std::vector<MatrixXd> pointwise_quantiles(const std::vector<MatrixXd>& paths, const std::vector<double>& levels);

GirfResult girf_run(const GirfRequest& request, const ModelSpec& spec, const Params& params, const Dataset& data);

}  // namespace stvar
