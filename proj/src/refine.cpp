#include <algorithm>
#include <cmath>
#include <cstring>

#include "stvar/estimate.hpp"
#include "stvar/hash.hpp"
#include "stvar/parallel.hpp"

namespace stvar {

Solution make_solution(const Objective& objective, const Params& params) {
  Solution sol;
  sol.params = params;
  const LoglikValue ll = objective.loglik(params);
  sol.ll = ll.value;
  sol.penalty = objective.penalty(params);
  sol.pen_ll = ll.ok() && std::isfinite(sol.penalty) ? sol.ll - sol.penalty : kRejected;
  const StabilityReport stability = stability_check(params);
  sol.max_modulus = stability.max_modulus;
  sol.stable = stability.stable;
  return sol;
}

Solution step3_refine(const Objective& objective, const Params& start, const RefineOptions& options) {
  const ParamCoder coder(objective.spec());
  const double initial = objective.pen_loglik(start);
  if (!std::isfinite(initial)) throw std::invalid_argument("refine: starting point has no finite likelihood");
  const auto f = [&](const VectorXd& x) { return objective.pen_loglik(coder.decode(x, start)); };
  const RefineResult result = maximize(f, coder.encode(start), options);
  Solution sol = make_solution(objective, coder.decode(result.x, start));
  if (!(sol.pen_ll >= initial)) sol = make_solution(objective, start);
  sol.converged = result.converged;
  sol.iterations = result.iterations;
  return sol;
}

std::string params_hash(const ModelSpec& spec, const Params& params) {
  VectorXd x = ParamCoder(spec).encode(params);
  std::string bytes(reinterpret_cast<const char*>(x.data()), static_cast<std::size_t>(x.size()) * sizeof(double));
  for (double r : params.weights.thresholds) bytes.append(reinterpret_cast<const char*>(&r), sizeof(double));
  return sha256_hex(bytes);
}

std::vector<Solution> rank_solutions(const ModelSpec& spec, std::vector<Solution> solutions, double ll_window,
                                     double distance, Index* removed) {
  const ParamCoder coder(spec);
  struct Entry {
    Solution sol;
    std::string hash;
    VectorXd coords;
  };
  std::vector<Entry> entries;
  for (auto& s : solutions) {
    if (!std::isfinite(s.pen_ll)) continue;
    VectorXd coords = coder.encode(s.params);
    std::string hash = params_hash(spec, s.params);
    entries.push_back(Entry{std::move(s), std::move(hash), std::move(coords)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.sol.pen_ll != b.sol.pen_ll) return a.sol.pen_ll > b.sol.pen_ll;
    return a.hash < b.hash;
  });
  std::vector<Solution> out;
  std::vector<const Entry*> kept;
  Index dropped = static_cast<Index>(solutions.size() - entries.size());
  for (const auto& e : entries) {
    bool duplicate = false;
    for (const Entry* k : kept) {
      if (std::abs(k->sol.pen_ll - e.sol.pen_ll) <= ll_window &&
          (k->coords - e.coords).lpNorm<Eigen::Infinity>() <= distance) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      ++dropped;
      continue;
    }
    kept.push_back(&e);
  }
  for (const Entry* k : kept) out.push_back(k->sol);
  if (removed) *removed = dropped;
  return out;
}

SolutionSet run_three_step(const ModelSpec& spec, const Dataset& data, const EstimateConfig& cfg) {
  if (cfg.rounds < 1) throw ConfigError("estimate: at least one round required");
  const Objective objective(spec, data, cfg.penalty);
  SolutionSet set;
  set.step1 = step1_pnls(spec, data, cfg.nls, cfg.penalty);
  set.rounds = cfg.rounds;

  const Index threads = resolve_threads(cfg.threads);
  const bool parallel_rounds = threads > 1 && cfg.rounds >= threads;
  std::vector<std::optional<Solution>> results(static_cast<std::size_t>(cfg.rounds));
  parallel_for(cfg.rounds, parallel_rounds ? threads : 1, [&](Index r) {
    GaConfig ga = cfg.ga;
    ga.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    ga.threads = parallel_rounds ? 1 : threads;
    try {
      const GaResult best = step2_ga(objective, set.step1, ga);
      Solution sol = step3_refine(objective, best.params, cfg.refine);
      sol.round_id = r;
      sol.seed = ga.seed;
      sol = normalize_solution(std::move(sol));
      if (cfg.check_jsr) sol.jsr = jsr_bounds(companions(sol.params), cfg.jsr);
      results[static_cast<std::size_t>(r)] = std::move(sol);
    } catch (const NumericError&) {
    } catch (const std::invalid_argument&) {
    }
  });

  std::vector<Solution> found;
  for (auto& r : results) {
    if (r) {
      found.push_back(std::move(*r));
    } else {
      ++set.failed_rounds;
    }
  }
  if (found.empty()) throw NumericError("estimate: every round failed", cfg.rounds);
  set.solutions = rank_solutions(spec, std::move(found), cfg.dedup_ll, cfg.dedup_distance, &set.duplicates);
  return set;
}

}  // namespace stvar
