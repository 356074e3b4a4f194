#include <algorithm>
#include <cmath>
#include <numeric>

#include "stvar/estimate.hpp"
#include "stvar/parallel.hpp"

namespace stvar {

void GaConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (population < 4 || population % 2 != 0) throw ConfigError("ga: population must be even and at least 4");
  if (generations < 0) throw ConfigError("ga: negative generation count");
  if (!unit(crossover_rate) || !unit(mutation_rate) || !unit(common_rotation_share)) {
    throw ConfigError("ga: rates must lie in [0, 1]");
  }
  if (!(mutation_scale >= 0.0) || !(init_noise >= 0.0)) throw ConfigError("ga: negative scale");
  if (tournament < 1 || elites < 1 || elites >= population) throw ConfigError("ga: invalid tournament or elite count");
  if (!(nu_low > 2.0) || !(nu_high > nu_low)) throw ConfigError("ga: nu range must satisfy 2 < low < high");
  if (!(lambda_abs > 0.0 && lambda_abs < 1.0)) throw ConfigError("ga: lambda range must lie inside (-1, 1)");
}

MatrixXd random_orthogonal(Index n, Rng& rng) {
  MatrixXd g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = standard_normal(rng);
  }
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * open_uniform(rng); }

// Residual covariance of the periods dominated by regime m, falling back to
// a weighted covariance over the whole sample.
MatrixXd regime_covariance(const MatrixXd& u, const MatrixXd& weights, Index m, double cut) {
  const Index d = u.cols();
  MatrixXd sum = MatrixXd::Zero(d, d);
  Index count = 0;
  for (Index t = 0; t < u.rows(); ++t) {
    if (weights(t, m) > cut) {
      sum.noalias() += u.row(t).transpose() * u.row(t);
      ++count;
    }
  }
  if (count > 2 * d) return sum / static_cast<double>(count);
  sum.setZero();
  double mass = 0.0;
  for (Index t = 0; t < u.rows(); ++t) {
    sum.noalias() += weights(t, m) * u.row(t).transpose() * u.row(t);
    mass += weights(t, m);
  }
  if (mass > 0.0) return sum / mass;
  return (u.transpose() * u) / static_cast<double>(std::max<Index>(1, u.rows()));
}

MatrixXd cholesky_factor(const MatrixXd& sigma) {
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const VectorXd diag = sigma.diagonal().cwiseMax(1e-8).cwiseSqrt();
  return diag.asDiagonal();
}

}  // namespace

GaResult step2_ga(const Objective& objective, const NlsResult& step1, const GaConfig& cfg) {
  cfg.validate();
  const ModelSpec& spec = objective.spec();
  const Index d = spec.d;
  const Index M = spec.M;
  const ParamCoder coder(spec, FreeBlocks{false, true, false, true});
  const Index genes = coder.size();
  const double pen = objective.penalty(step1.params);
  const MatrixXd& u = step1.residuals;
  const MatrixXd& weights = step1.weights;

  auto fitness = [&](const VectorXd& x) {
    if (!std::isfinite(pen)) return kRejected;
    const Params params = coder.decode(x, step1.params);
    const LoglikValue ll = structural_loglik(u, weights, params.impact, params.nu, params.lambda);
    return ll.ok() ? ll.value - pen : kRejected;
  };

  Rng rng(cfg.seed);
  std::vector<MatrixXd> chol;
  VectorXd gene_scale = VectorXd::Ones(genes);
  for (Index m = 0; m < M; ++m) {
    chol.push_back(cholesky_factor(regime_covariance(u, weights, m, cfg.regime_weight_cut)));
    const double scale = std::sqrt(chol.back().squaredNorm() / static_cast<double>(d));
    gene_scale.segment(m * d * d, d * d).setConstant(std::max(scale, 1e-8));
  }

  const auto n = static_cast<std::size_t>(cfg.population);
  std::vector<VectorXd> pop(n);
  const auto common = static_cast<std::size_t>(std::llround(cfg.common_rotation_share * static_cast<double>(n)));
  for (std::size_t k = 0; k < n; ++k) {
    Params draw = step1.params;
    const MatrixXd shared = random_orthogonal(d, rng);
    for (Index m = 0; m < M; ++m) {
      const MatrixXd q = k < common ? shared : random_orthogonal(d, rng);
      MatrixXd b = chol[static_cast<std::size_t>(m)] * q;
      const double noise = cfg.init_noise * gene_scale(m * d * d);
      for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < d; ++i) b(i, j) += noise * standard_normal(rng);
      }
      draw.impact[static_cast<std::size_t>(m)] = b;
    }
    for (Index i = 0; i < d; ++i) draw.nu(i) = uniform(rng, cfg.nu_low, cfg.nu_high);
    for (Index i = 0; i < d; ++i) draw.lambda(i) = uniform(rng, -cfg.lambda_abs, cfg.lambda_abs);
    pop[k] = coder.encode(draw);
  }

  std::vector<double> fit(n);
  auto evaluate = [&](std::vector<VectorXd>& members, std::vector<double>& values, std::size_t from) {
    parallel_for(static_cast<Index>(members.size() - from), cfg.threads, [&](Index i) {
      const auto k = from + static_cast<std::size_t>(i);
      values[k] = fitness(members[k]);
    });
  };
  evaluate(pop, fit, 0);

  GaResult out;
  out.feasible_initial = static_cast<Index>(std::count_if(fit.begin(), fit.end(), [](double v) { return v > kRejected; }));
  if (out.feasible_initial == 0) {
    throw NumericError("ga: every initial individual has a singular impact matrix", 0);
  }

  std::vector<std::size_t> order(n);
  auto rank = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
  };
  auto tournament = [&]() -> const VectorXd& {
    std::size_t best = static_cast<std::size_t>(rng() % n);
    for (Index k = 1; k < cfg.tournament; ++k) {
      const auto c = static_cast<std::size_t>(rng() % n);
      if (fit[c] > fit[best] || (fit[c] == fit[best] && c < best)) best = c;
    }
    return pop[best];
  };

  rank();
  for (Index g = 0; g < cfg.generations; ++g) {
    const double anneal = std::max(0.05, 1.0 - static_cast<double>(g) / static_cast<double>(cfg.generations));
    std::vector<VectorXd> next;
    std::vector<double> next_fit(n, kRejected);
    for (Index e = 0; e < cfg.elites; ++e) {
      next.push_back(pop[order[static_cast<std::size_t>(e)]]);
      next_fit[static_cast<std::size_t>(e)] = fit[order[static_cast<std::size_t>(e)]];
    }
    while (next.size() < n) {
      VectorXd a = tournament();
      VectorXd b = tournament();
      if (open_uniform(rng) < cfg.crossover_rate) {
        for (Index j = 0; j < genes; ++j) {
          const double lo = std::min(a(j), b(j));
          const double hi = std::max(a(j), b(j));
          const double span = hi - lo;
          const double x = uniform(rng, lo - 0.5 * span, hi + 0.5 * span);
          const double y = uniform(rng, lo - 0.5 * span, hi + 0.5 * span);
          a(j) = x;
          b(j) = y;
        }
      }
      for (VectorXd* child : {&a, &b}) {
        for (Index j = 0; j < genes; ++j) {
          if (open_uniform(rng) < cfg.mutation_rate) {
            (*child)(j) += cfg.mutation_scale * anneal * gene_scale(j) * standard_normal(rng);
          }
        }
        if (next.size() < n) next.push_back(std::move(*child));
      }
    }
    evaluate(next, next_fit, static_cast<std::size_t>(cfg.elites));
    pop = std::move(next);
    fit = std::move(next_fit);
    rank();
    out.best_history.push_back(fit[order[0]]);
  }

  out.params = coder.decode(pop[order[0]], step1.params);
  out.pen_ll = fit[order[0]];
  return out;
}

}  // namespace stvar
