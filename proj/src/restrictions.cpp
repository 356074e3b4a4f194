#include <algorithm>
#include <cmath>
#include <numeric>

#include "stvar/estimate.hpp"

namespace stvar {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

std::vector<std::size_t> regimes_of(const Restriction& r, std::size_t count) {
  std::vector<std::size_t> out;
  if (r.regime) {
    const auto m = static_cast<std::size_t>(*r.regime);
    if (m >= count) throw std::out_of_range("restriction: regime index out of range");
    out.push_back(m);
  } else {
    for (std::size_t m = 0; m < count; ++m) out.push_back(m);
  }
  return out;
}

void check_entry(const MatrixXd& b, std::pair<Index, Index> e) {
  if (e.first < 0 || e.second < 0 || e.first >= b.rows() || e.second >= b.cols()) {
    throw std::out_of_range("restriction: entry index out of range");
  }
}

}  // namespace

bool satisfies(const Restriction& r, const std::vector<MatrixXd>& impact) {
  if (r.entries.empty()) throw std::invalid_argument("restriction: no entries given");
  const auto regimes = regimes_of(r, impact.size());
  for (const auto& e : r.entries) check_entry(impact.front(), e);
  switch (r.kind) {
    case RestrictionKind::sign:
      for (std::size_t m : regimes) {
        for (const auto& [i, j] : r.entries) {
          if (sign_of(impact[m](i, j)) != r.sign) return false;
        }
      }
      return true;
    case RestrictionKind::dominance:
      for (std::size_t m : regimes) {
        for (const auto& [i, j] : r.entries) {
          for (Index k = 0; k < impact[m].cols(); ++k) {
            if (k != j && !(std::abs(impact[m](i, j)) > std::abs(impact[m](i, k)))) return false;
          }
        }
      }
      return true;
    case RestrictionKind::cross_sign:
      if (r.entries.size() == 1) {
        const auto [i, j] = r.entries.front();
        const int first = sign_of(impact[regimes.front()](i, j));
        if (first == 0) return false;
        for (std::size_t k = 1; k < regimes.size(); ++k) {
          const int s = sign_of(impact[regimes[k]](i, j));
          if (s != (r.same ? first : -first)) return false;
        }
        return true;
      }
      if (r.entries.size() == 2) {
        for (std::size_t m : regimes) {
          const int a = sign_of(impact[m](r.entries[0].first, r.entries[0].second));
          const int b = sign_of(impact[m](r.entries[1].first, r.entries[1].second));
          if (a == 0 || b == 0 || (a == b) != r.same) return false;
        }
        return true;
      }
      throw std::invalid_argument("restriction: cross_sign takes one or two entries");
  }
  return false;
}

FilterResult filter_solutions(const std::vector<Solution>& solutions, const RestrictionSet& restrictions,
                              double ll_window) {
  FilterResult out;
  out.failure_counts.assign(restrictions.size(), 0);
  if (solutions.empty()) return out;
  double best = kRejected;
  for (const auto& s : solutions) best = std::max(best, s.pen_ll);
  const Index d = solutions.front().params.dim();
  if (d > 8) throw std::invalid_argument("filter: column assignments are enumerated only for d <= 8");

  std::vector<Labeling> assignments;
  std::vector<Index> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      VectorXd signs(d);
      for (Index j = 0; j < d; ++j) signs(j) = (mask >> j) & 1u ? -1.0 : 1.0;
      assignments.push_back(Labeling{perm, signs});
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (std::size_t rank = 0; rank < solutions.size(); ++rank) {
    const Solution& sol = solutions[rank];
    if (!(sol.pen_ll >= best - ll_window)) {
      ++out.outside_window;
      continue;
    }
    std::optional<std::size_t> first;
    Index satisfying = 0;
    std::vector<bool> best_violations;
    std::size_t fewest = restrictions.size() + 1;
    for (std::size_t a = 0; a < assignments.size(); ++a) {
      const Params labeled = transform_columns(sol.params, assignments[a].perm, assignments[a].signs);
      std::vector<bool> violated(restrictions.size());
      std::size_t count = 0;
      for (std::size_t k = 0; k < restrictions.size(); ++k) {
        violated[k] = !satisfies(restrictions[k], labeled.impact);
        count += violated[k];
      }
      if (count == 0) {
        ++satisfying;
        if (!first) first = a;
      }
      if (count < fewest) {
        fewest = count;
        best_violations = violated;
      }
    }
    if (first) {
      FilteredSolution kept;
      kept.labeling = assignments[*first];
      kept.solution = sol;
      kept.solution.params = transform_columns(sol.params, kept.labeling.perm, kept.labeling.signs);
      kept.source_rank = static_cast<Index>(rank);
      kept.satisfying_assignments = satisfying;
      out.survivors.push_back(std::move(kept));
    } else {
      for (std::size_t k = 0; k < restrictions.size(); ++k) out.failure_counts[k] += best_violations[k];
    }
  }
  return out;
}

}  // namespace stvar
