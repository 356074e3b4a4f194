#include "stvar/model.hpp"

#include <boost/math/distributions/normal.hpp>

#include "stvar/rng.hpp"

namespace stvar {

double standard_normal(Rng& rng) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), open_uniform(rng));
}

void ModelSpec::validate() const {
  if (d < 1 || p < 1 || M < 1) throw std::invalid_argument("model: d, p and M must be positive");
  if (weights.regimes != M) throw std::invalid_argument("model: weight spec regime count differs from M");
  if (weights.kind == WeightKind::logistic && M != 2) {
    throw std::invalid_argument("model: logistic weights require M = 2");
  }
  if (weights.kind != WeightKind::exogenous) {
    if (weights.switch_var.variable < 0 || weights.switch_var.variable >= d) {
      throw std::invalid_argument("model: switching variable index out of range");
    }
    if (weights.switch_var.lag < 1 || weights.switch_var.lag > p) {
      throw std::invalid_argument("model: switching lag must lie in 1..p");
    }
  }
}

Params default_params(const ModelSpec& spec) {
  Params params;
  params.phi.assign(static_cast<std::size_t>(spec.M), VectorXd::Zero(spec.d));
  params.ar.assign(static_cast<std::size_t>(spec.M),
                   std::vector<MatrixXd>(static_cast<std::size_t>(spec.p), MatrixXd::Zero(spec.d, spec.d)));
  params.impact.assign(static_cast<std::size_t>(spec.M), MatrixXd::Identity(spec.d, spec.d));
  params.nu = VectorXd::Constant(spec.d, 10.0);
  params.lambda = VectorXd::Zero(spec.d);
  if (spec.weights.kind == WeightKind::threshold) {
    for (Index m = 1; m < spec.M; ++m) params.weights.thresholds.push_back(static_cast<double>(m));
  }
  return params;
}

void validate(const ModelSpec& spec, const Params& params) {
  spec.validate();
  const auto M = static_cast<std::size_t>(spec.M);
  if (params.phi.size() != M || params.ar.size() != M || params.impact.size() != M) {
    throw std::invalid_argument("params: expected " + std::to_string(M) + " regimes");
  }
  for (std::size_t m = 0; m < M; ++m) {
    if (params.phi[m].size() != spec.d) throw std::invalid_argument("params: phi has wrong length");
    if (params.ar[m].size() != static_cast<std::size_t>(spec.p)) {
      throw std::invalid_argument("params: expected p AR matrices per regime");
    }
    for (const auto& a : params.ar[m]) {
      if (a.rows() != spec.d || a.cols() != spec.d) throw std::invalid_argument("params: AR matrix must be d x d");
    }
    const auto& b = params.impact[m];
    if (b.rows() != spec.d || b.cols() != spec.d) throw std::invalid_argument("params: B must be d x d");
    if (is_singular(b)) {
      throw std::invalid_argument("params: impact matrix B_" + std::to_string(m + 1) + " is singular");
    }
  }
  if (params.nu.size() != spec.d || params.lambda.size() != spec.d) {
    throw std::invalid_argument("params: nu and lambda need d entries");
  }
  for (Index i = 0; i < spec.d; ++i) SkewTParams(params.nu(i), params.lambda(i));
  validate(spec.weights, params.weights);
}

std::vector<SkewTParams> shock_distributions(const Params& params) {
  std::vector<SkewTParams> out;
  out.reserve(static_cast<std::size_t>(params.nu.size()));
  for (Index i = 0; i < params.nu.size(); ++i) out.emplace_back(params.nu(i), params.lambda(i));
  return out;
}

MatrixXd Dataset::stacked() const {
  MatrixXd out(presample.rows() + body.rows(), body.cols());
  if (presample.rows() > 0) out.topRows(presample.rows()) = presample;
  if (body.rows() > 0) out.bottomRows(body.rows()) = body;
  return out;
}

MatrixXd Dataset::lags(Index t) const {
  const Index p = presample.rows();
  const Index d = dim();
  MatrixXd out(p, d);
  for (Index i = 1; i <= p; ++i) {
    const Index row = t - i;  // index into body, negative -> presample
    out.row(i - 1) = row >= 0 ? body.row(row) : presample.row(p + row);
  }
  return out;
}

Dataset Dataset::from_rows(const MatrixXd& rows, Index p, std::vector<std::string> names) {
  if (rows.rows() < p) throw std::invalid_argument("dataset: fewer rows than the presample length");
  Dataset data;
  data.presample = rows.topRows(p);
  data.body = rows.bottomRows(rows.rows() - p);
  if (names.empty()) {
    for (Index i = 0; i < rows.cols(); ++i) names.push_back("y" + std::to_string(i + 1));
  }
  if (static_cast<Index>(names.size()) != rows.cols()) throw std::invalid_argument("dataset: one name per column");
  data.names = std::move(names);
  return data;
}

namespace {
std::string singular_message(Index period) {
  return "impact matrix B_{y,t} is singular at period " + std::to_string(period + 1);
}
}  // namespace

SingularImpactError::SingularImpactError(Index period, VectorXd weights)
    : std::runtime_error(singular_message(period)), period_(period), weights_(std::move(weights)) {}

MatrixXd coefficient_matrix(const Params& params, Index m) {
  const Index d = params.dim();
  const Index p = params.order();
  MatrixXd coef(1 + d * p, d);
  const auto mi = static_cast<std::size_t>(m);
  coef.row(0) = params.phi[mi].transpose();
  for (Index i = 0; i < p; ++i) coef.middleRows(1 + i * d, d) = params.ar[mi][static_cast<std::size_t>(i)].transpose();
  return coef;
}

void set_coefficients(Params& params, Index m, const Eigen::Ref<const MatrixXd>& coef) {
  const Index d = params.dim();
  const Index p = params.order();
  const auto mi = static_cast<std::size_t>(m);
  params.phi[mi] = coef.row(0).transpose();
  for (Index i = 0; i < p; ++i) params.ar[mi][static_cast<std::size_t>(i)] = coef.middleRows(1 + i * d, d).transpose();
}

Design make_design(const ModelSpec& spec, const Dataset& data) {
  if (data.presample.rows() != spec.p) throw ShapeError("design: presample must have p rows");
  if (data.dim() != spec.d) throw ShapeError("design: data has the wrong number of variables");
  const Index T = data.periods();
  const MatrixXd all = data.stacked();
  Design design;
  design.y = data.body;
  design.regressors.resize(T, 1 + spec.d * spec.p);
  design.regressors.col(0).setOnes();
  for (Index i = 1; i <= spec.p; ++i) {
    design.regressors.middleCols(1 + (i - 1) * spec.d, spec.d) = all.middleRows(spec.p - i, T);
  }
  if (spec.weights.kind != WeightKind::exogenous) {
    const auto& sw = spec.weights.switch_var;
    design.z = all.col(sw.variable).segment(spec.p - sw.lag, T);
  }
  return design;
}

MatrixXd weight_path(const ModelSpec& spec, const Params& params, const Design& design) {
  return weight_path(spec.weights, params.weights, design.z, design.y.rows());
}

MatrixXd cond_mean_path(const Params& params, const Design& design,
                        const Eigen::Ref<const MatrixXd>& weights) {
  MatrixXd mean = MatrixXd::Zero(design.y.rows(), design.y.cols());
  for (Index m = 0; m < params.regimes(); ++m) {
    mean.noalias() += weights.col(m).asDiagonal() * (design.regressors * coefficient_matrix(params, m));
  }
  return mean;
}

VectorXd unconditional_mean(const Params& params, Index m) {
  const Index d = params.dim();
  MatrixXd lhs = MatrixXd::Identity(d, d);
  for (const auto& a : params.ar[static_cast<std::size_t>(m)]) lhs -= a;
  return solve(lhs, params.phi[static_cast<std::size_t>(m)]);
}

namespace {

// One step of the recursion given the lag matrix (row i-1 = y_{t-i}).
VectorXd step(const Params& params, const MatrixXd& lags, const VectorXd& alpha,
              const VectorXd& e, MatrixXd* impact_out, Index period) {
  const auto means = regime_means<double>(params, lags);
  MatrixXd bt = impact_matrix<double>(params, alpha, period);
  VectorXd y = cond_mean<double>(alpha, means) + bt * e;
  if (impact_out) *impact_out = std::move(bt);
  return y;
}

void push_lag(MatrixXd& lags, const VectorXd& y) {
  for (Index i = lags.rows() - 1; i > 0; --i) lags.row(i) = lags.row(i - 1);
  lags.row(0) = y.transpose();
}

VectorXd draw_shocks(const std::vector<SkewTParams>& dists, Rng& rng) {
  VectorXd e(static_cast<Index>(dists.size()));
  for (std::size_t i = 0; i < dists.size(); ++i) e(static_cast<Index>(i)) = sample(dists[i], rng);
  return e;
}

}  // namespace

Simulation simulate(const ModelSpec& spec, const Params& params, const SimulationOptions& options) {
  validate(spec, params);
  if (options.periods < 0) throw std::invalid_argument("simulate: negative sample length");
  const Index d = spec.d;
  const Index p = spec.p;
  const auto dists = shock_distributions(params);
  Rng rng(options.seed);

  MatrixXd lags(p, d);  // row i-1 = y_{t-i}
  if (options.presample) {
    const MatrixXd& pre = *options.presample;
    if (pre.rows() != p || pre.cols() != d) throw ShapeError("simulate: presample must be p x d");
    for (Index i = 0; i < p; ++i) lags.row(i) = pre.row(p - 1 - i);
  } else {
    VectorXd start = VectorXd::Zero(d);
    try {
      start = unconditional_mean(params, 0);
    } catch (const SingularMatrixError&) {
      // unit root in regime 1: start from zero
    }
    start += params.impact[0] * draw_shocks(dists, rng);
    for (Index i = 0; i < p; ++i) lags.row(i) = start.transpose();
    for (Index b = 0; b < options.burnin; ++b) {
      const VectorXd alpha = eval_weights(spec.weights, params.weights, lags, 0);
      const VectorXd y = step(params, lags, alpha, draw_shocks(dists, rng), nullptr, -(b + 1));
      push_lag(lags, y);
    }
  }

  Simulation sim;
  MatrixXd presample(p, d);
  for (Index i = 0; i < p; ++i) presample.row(i) = lags.row(p - 1 - i);
  sim.shocks.resize(options.periods, d);
  sim.weights.resize(options.periods, spec.M);
  sim.impact.reserve(static_cast<std::size_t>(options.periods));
  MatrixXd body(options.periods, d);
  for (Index t = 0; t < options.periods; ++t) {
    const VectorXd alpha = eval_weights(spec.weights, params.weights, lags, t);
    const VectorXd e = draw_shocks(dists, rng);
    MatrixXd bt;
    const VectorXd y = step(params, lags, alpha, e, &bt, t);
    body.row(t) = y.transpose();
    sim.shocks.row(t) = e.transpose();
    sim.weights.row(t) = alpha.transpose();
    sim.impact.push_back(std::move(bt));
    push_lag(lags, y);
  }
  std::vector<std::string> names;
  for (Index i = 0; i < d; ++i) names.push_back("y" + std::to_string(i + 1));
  sim.data.presample = std::move(presample);
  sim.data.body = std::move(body);
  sim.data.names = std::move(names);
  return sim;
}

Residuals residuals(const ModelSpec& spec, const Params& params, const Dataset& data) {
  validate(spec, params);
  const Design design = make_design(spec, data);
  Residuals out;
  out.weights = weight_path(spec, params, design);
  out.reduced = design.y - cond_mean_path(params, design, out.weights);
  out.structural.resize(out.reduced.rows(), out.reduced.cols());
  for (Index t = 0; t < out.reduced.rows(); ++t) {
    const VectorXd alpha = out.weights.row(t).transpose();
    const MatrixXd bt = impact_matrix<double>(params, alpha, t);
    out.structural.row(t) = Eigen::PartialPivLU<MatrixXd>(bt).solve(out.reduced.row(t).transpose()).transpose();
  }
  return out;
}

}  // namespace stvar
