#include <algorithm>
#include <cmath>
#include <numeric>

#include "stvar/estimate.hpp"

namespace stvar {

Params transform_columns(const Params& params, const std::vector<Index>& perm, const VectorXd& signs) {
  const Index d = params.dim();
  if (static_cast<Index>(perm.size()) != d || signs.size() != d) {
    throw ShapeError("transform_columns: permutation and signs need d entries");
  }
  Params out = params;
  for (std::size_t m = 0; m < params.impact.size(); ++m) {
    for (Index j = 0; j < d; ++j) {
      out.impact[m].col(j) = signs(j) * params.impact[m].col(perm[static_cast<std::size_t>(j)]);
    }
  }
  for (Index j = 0; j < d; ++j) {
    const Index src = perm[static_cast<std::size_t>(j)];
    out.nu(j) = params.nu(src);
    out.lambda(j) = signs(j) * params.lambda(src);
  }
  return out;
}

namespace {

std::vector<Index> nu_order(const Params& params) {
  std::vector<Index> perm(static_cast<std::size_t>(params.dim()));
  std::iota(perm.begin(), perm.end(), 0);
  const MatrixXd& b1 = params.impact.front();
  std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) {
    if (params.nu(a) != params.nu(b)) return params.nu(a) < params.nu(b);
    return std::abs(b1(0, a)) > std::abs(b1(0, b));
  });
  return perm;
}

// Sign making the first maximal-magnitude entry of the column positive.
double dominant_sign(const Eigen::Ref<const VectorXd>& column) {
  Index at = 0;
  for (Index i = 1; i < column.size(); ++i) {
    if (std::abs(column(i)) > std::abs(column(at))) at = i;
  }
  return column(at) < 0.0 ? -1.0 : 1.0;
}

}  // namespace

Params normalize_params(const Params& params) {
  const std::vector<Index> perm = nu_order(params);
  VectorXd signs(params.dim());
  for (Index j = 0; j < params.dim(); ++j) {
    signs(j) = dominant_sign(params.impact.front().col(perm[static_cast<std::size_t>(j)]));
  }
  return transform_columns(params, perm, signs);
}

Solution normalize_solution(Solution sol) {
  sol.params = normalize_params(sol.params);
  sol.normalized = true;
  return sol;
}

Params normalize_by_skewness(const Params& params, const VectorXd& lambda_signs) {
  if (lambda_signs.size() != params.dim()) throw ShapeError("normalize_by_skewness: one sign per shock");
  const std::vector<Index> perm = nu_order(params);
  VectorXd signs(params.dim());
  for (Index j = 0; j < params.dim(); ++j) {
    const Index src = perm[static_cast<std::size_t>(j)];
    const double lambda = params.lambda(src);
    if (lambda_signs(j) != 0.0 && lambda != 0.0) {
      signs(j) = (lambda > 0.0) == (lambda_signs(j) > 0.0) ? 1.0 : -1.0;
    } else {
      signs(j) = dominant_sign(params.impact.front().col(src));
    }
  }
  return transform_columns(params, perm, signs);
}

}  // namespace stvar
