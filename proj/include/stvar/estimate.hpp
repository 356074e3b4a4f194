#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stvar/likelihood.hpp"
#include "stvar/optim.hpp"
#include "stvar/rng.hpp"
#include "stvar/stationarity.hpp"

namespace stvar {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Step 1: penalized NLS over a weight-parameter grid

struct NlsConfig {
  Index grid_points = 11;
  /// Logistic: {(c_lo, c_hi), (gamma_lo, gamma_hi)}; threshold: one range
  /// shared by every r_m. Empty means data-driven defaults.
  std::vector<std::pair<double, double>> ranges;
  /// Overrides the minimum weight mass per regime, 3k/d by default.
  std::optional<double> min_contribution;
};

struct NlsResult {
  Params params;           // AR and weight parameters; B, nu, lambda at defaults
  double q = 0.0;          // sum of squared residuals at the selection
  double pq = 0.0;         // penalized objective at the selection
  double rss_hat = 0.0;    // min Q over the screened grid
  double min_contribution = 0.0;
  Index grid_size = 0;
  Index screened = 0;      // grid points passing the weight-mass screen
  MatrixXd residuals;      // T x d, u_t at the selection
  MatrixXd weights;        // T x M
};

/// T~ = 3k/d with k = d + p d^2 + d^2 parameters per regime.
double default_min_contribution(const ModelSpec& spec);

/// Closed-form weighted least squares for the AR parameters given a weight
/// path. Returns the (1 + dp) x d coefficient blocks stacked over regimes.
MatrixXd nls_coefficients(const Design& design, const Eigen::Ref<const MatrixXd>& weights, Index regimes);

/// Candidate weight parameters of the grid, before screening.
std::vector<WeightParams> weight_grid(const ModelSpec& spec, const Design& design, const NlsConfig& cfg);

NlsResult step1_pnls(const ModelSpec& spec, const Dataset& data, const NlsConfig& nls = {},
                     const PenaltyConfig& pen = {});

// ---------------------------------------------------------------------------
// Step 2: genetic algorithm over (vec B_1..B_M, log(nu - 2), atanh(lambda))

struct GaConfig {
  Index population = 64;
  Index generations = 200;
  double crossover_rate = 0.9;
  double mutation_rate = 0.15;
  double mutation_scale = 0.3;
  Index tournament = 3;
  Index elites = 2;
  double nu_low = 2.5;
  double nu_high = 30.0;
  double lambda_abs = 0.6;
  /// Share of the initial B draws that use one rotation for every regime.
  double common_rotation_share = 0.5;
  double init_noise = 0.05;
  double regime_weight_cut = 0.7;
  std::uint64_t seed = 1;
  Index threads = 1;
  void validate() const;
};

struct GaResult {
  Params params;
  double pen_ll = kRejected;
  std::vector<double> best_history;  // best fitness after each generation
  Index feasible_initial = 0;
};

/// Random orthogonal matrix distributed by Haar measure.
MatrixXd random_orthogonal(Index n, Rng& rng);

GaResult step2_ga(const Objective& objective, const NlsResult& step1, const GaConfig& cfg);

// ---------------------------------------------------------------------------
// Step 3 and orchestration

struct Solution {
  Params params;
  double pen_ll = kRejected;
  double ll = kRejected;
  double penalty = 0.0;
  std::vector<double> max_modulus;
  bool stable = false;
  std::optional<JsrBound> jsr;
  bool normalized = false;
  bool converged = false;
  Index iterations = 0;
  Index round_id = 0;
  std::uint64_t seed = 0;
};

Solution make_solution(const Objective& objective, const Params& params);

Solution step3_refine(const Objective& objective, const Params& start, const RefineOptions& options = {});

struct EstimateConfig {
  Index rounds = 24;
  NlsConfig nls;
  GaConfig ga;
  PenaltyConfig penalty;
  RefineOptions refine;
  std::uint64_t seed = 1;
  Index threads = 1;
  bool check_jsr = false;
  JsrOptions jsr;
  double dedup_ll = 0.1;
  double dedup_distance = 1e-3;
};

struct SolutionSet {
  std::vector<Solution> solutions;  // ranked by pen_ll descending
  NlsResult step1;
  Index rounds = 0;
  Index failed_rounds = 0;
  Index duplicates = 0;
};

SolutionSet run_three_step(const ModelSpec& spec, const Dataset& data, const EstimateConfig& cfg);

/// Deduplicates normalized solutions and ranks them by pen_ll, ties broken
/// by the parameter hash.
std::vector<Solution> rank_solutions(const ModelSpec& spec, std::vector<Solution> solutions, double ll_window,
                                     double distance, Index* removed = nullptr);

/// Hex digest of the parameter values, used as a deterministic tie-breaker.
std::string params_hash(const ModelSpec& spec, const Params& params);

// ---------------------------------------------------------------------------
// Column permutation and sign transforms of the impact matrices

/// Column j of the result is signs(j) * column perm[j] of the input, applied
/// to every B_m; nu and lambda are permuted alike and lambda is sign-flipped.
Params transform_columns(const Params& params, const std::vector<Index>& perm, const VectorXd& signs);

/// nu ascending (ties: |first row of B_1| descending); the first entry of
/// maximal magnitude in each column of B_1 made positive.
Solution normalize_solution(Solution sol);
Params normalize_params(const Params& params);

/// nu ascending; column signs chosen so that sign(lambda_i) matches
/// `lambda_signs(i)` where it is nonzero.
Params normalize_by_skewness(const Params& params, const VectorXd& lambda_signs);

// ---------------------------------------------------------------------------
// Blended identification

enum class RestrictionKind { sign, dominance, cross_sign };

struct Restriction {
  RestrictionKind kind = RestrictionKind::sign;
  std::optional<Index> regime;  // zero-based; empty means all regimes
  std::vector<std::pair<Index, Index>> entries;  // zero-based (row, col)
  int sign = 1;                 // sign restrictions
  bool same = true;             // cross_sign relation: same or opposite
  std::string label;
};

using RestrictionSet = std::vector<Restriction>;

/// Whether the (already column-transformed) impact matrices satisfy r.
bool satisfies(const Restriction& r, const std::vector<MatrixXd>& impact);

struct Labeling {
  std::vector<Index> perm;
  VectorXd signs;
};

struct FilteredSolution {
  Solution solution;  // with the labeling applied
  Labeling labeling;
  Index source_rank = 0;
  Index satisfying_assignments = 0;
};

struct FilterResult {
  std::vector<FilteredSolution> survivors;
  std::vector<Index> failure_counts;  // per restriction, under the best assignment
  Index outside_window = 0;
};

FilterResult filter_solutions(const std::vector<Solution>& solutions, const RestrictionSet& restrictions,
                              double ll_window = 5.0);

}  // namespace stvar
