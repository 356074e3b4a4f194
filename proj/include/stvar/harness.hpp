#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "stvar/io.hpp"

namespace stvar {

/// Bivariate logistic STVAR(1) with two regimes; switching variable y_{1,t-1}.
/// Variant 1 has moderately persistent regimes, variant 2 a near-unit-root one.
Model lstvar_fixture(int variant);

/// Named scalar coordinates of a parameter vector (phi, A, B, weights, nu, lambda).
struct Coordinate {
  std::string name;
  double value;
};
std::vector<Coordinate> flatten_params(const ModelSpec& spec, const Params& params);

struct McDesign {
  Model truth;
  std::vector<Index> sample_sizes{500, 10000};
  Index replications = 25;
  std::uint64_t seed = 1;
  Index burnin = 1000;
  Index threads = 1;
  EstimateConfig estimate;
};

/// Harness defaults: 8 rounds of 100 GA generations.
McDesign default_mc_design(int variant);

struct McCell {
  std::string parameter;
  Index periods;
  double mean_error;
  double sd;
  Index count;
};

struct McReport {
  std::vector<McCell> cells;  // grouped by sample size, coordinates in flatten order
  std::vector<Index> failures;  // per sample size
  std::vector<std::string> failure_messages;
  bool failed = false;  // some sample size lost 10% or more of its replications
  const McCell* find(const std::string& parameter, Index periods) const;
};

using McProgress = std::function<void(Index periods, Index replication, bool ok)>;

/// Simulate, estimate, normalize (nu ascending, skewness signs of the truth)
/// and compare with the truth for every replication and sample size.
McReport run_mc(const McDesign& design, const McProgress& progress = {});

void write_mc_report(std::ostream& out, const McReport& report, const Provenance& provenance);

}  // namespace stvar
