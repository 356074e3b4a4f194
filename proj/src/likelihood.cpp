#include "stvar/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stvar/stationarity.hpp"

namespace stvar {

void PenaltyConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("penalty: eta must lie in (0, 1)");
  if (!(kappa > 0.0)) throw std::invalid_argument("penalty: kappa must be positive");
}

double stability_excess(const std::vector<VectorXd>& moduli, double eta) {
  double sum = 0.0;
  for (const auto& regime : moduli) {
    for (Index i = 0; i < regime.size(); ++i) {
      const double excess = std::max(0.0, regime(i) - (1.0 - eta));
      sum += excess * excess;
    }
  }
  return sum;
}

double stability_excess(const Params& params, double eta) {
  std::vector<VectorXd> moduli;
  for (Index m = 0; m < params.regimes(); ++m) {
    const MatrixXd a = companion(params, m);
    if (!a.allFinite()) return std::numeric_limits<double>::infinity();
    moduli.push_back(eigenvalue_moduli(a));
  }
  return stability_excess(moduli, eta);
}

double penalty(const ModelSpec& spec, const Params& params, Index periods, const PenaltyConfig& cfg) {
  cfg.validate();
  return cfg.kappa * static_cast<double>(periods) * static_cast<double>(spec.d) *
         stability_excess(params, cfg.eta);
}

namespace {

template <int Dim>
LoglikValue structural_kernel(const MatrixXd& ut, const Eigen::Ref<const MatrixXd>& weights,
                              const std::vector<MatrixXd>& impact, const std::vector<SkewTParams>& dists) {
  using Mat = Eigen::Matrix<double, Dim, Dim>;
  using Vec = Eigen::Matrix<double, Dim, 1>;
  const Index d = ut.rows();
  const Index periods = ut.cols();
  const Index regimes = weights.cols();
  std::vector<Mat> b;
  for (const auto& m : impact) b.emplace_back(m);
  if constexpr (Dim == 2) {
    double total = 0.0;
    for (Index t = 0; t < periods; ++t) {
      Mat bt = weights(t, 0) * b[0];
      for (Index m = 1; m < regimes; ++m) bt += weights(t, m) * b[static_cast<std::size_t>(m)];
      const double det = bt(0, 0) * bt(1, 1) - bt(0, 1) * bt(1, 0);
      const double scale = std::hypot(bt(0, 0), bt(0, 1)) * std::hypot(bt(1, 0), bt(1, 1));
      if (!(scale > 0.0) || !(std::abs(det) >= kSingularityTol * scale)) return LoglikValue{kRejected, t};
      const double u0 = ut(0, t);
      const double u1 = ut(1, t);
      const double e0 = (bt(1, 1) * u0 - bt(0, 1) * u1) / det;
      const double e1 = (bt(0, 0) * u1 - bt(1, 0) * u0) / det;
      total += dists[0].log_pdf(e0) + dists[1].log_pdf(e1) - std::log(std::abs(det));
    }
    if (!std::isfinite(total)) return LoglikValue{kRejected, -1};
    return LoglikValue{total, -1};
  }
  Mat bt(d, d);
  Vec e(d);
  Eigen::PartialPivLU<Mat> lu(d);
  double total = 0.0;
  for (Index t = 0; t < periods; ++t) {
    bt = weights(t, 0) * b[0];
    for (Index m = 1; m < regimes; ++m) bt += weights(t, m) * b[static_cast<std::size_t>(m)];
    lu.compute(bt);
    const double det = std::abs(lu.determinant());
    const double scale = bt.rowwise().norm().prod();
    if (!(scale > 0.0) || !(det >= kSingularityTol * scale)) return LoglikValue{kRejected, t};
    e.noalias() = lu.solve(ut.col(t));
    total -= std::log(det);
    for (Index i = 0; i < d; ++i) total += dists[static_cast<std::size_t>(i)].log_pdf(e(i));
  }
  if (!std::isfinite(total)) return LoglikValue{kRejected, -1};
  return LoglikValue{total, -1};
}

bool shock_params_valid(const Eigen::Ref<const VectorXd>& nu, const Eigen::Ref<const VectorXd>& lambda) {
  for (Index i = 0; i < nu.size(); ++i) {
    if (!(nu(i) > 2.0) || !std::isfinite(nu(i)) || !(std::abs(lambda(i)) < 1.0)) return false;
  }
  return true;
}

bool params_valid(const ModelSpec& spec, const Params& params) {
  const auto M = static_cast<std::size_t>(spec.M);
  if (params.phi.size() != M || params.ar.size() != M || params.impact.size() != M) return false;
  if (params.nu.size() != spec.d || params.lambda.size() != spec.d) return false;
  for (std::size_t m = 0; m < M; ++m) {
    if (params.phi[m].size() != spec.d || !params.phi[m].allFinite()) return false;
    if (params.ar[m].size() != static_cast<std::size_t>(spec.p)) return false;
    for (const auto& a : params.ar[m]) {
      if (a.rows() != spec.d || a.cols() != spec.d || !a.allFinite()) return false;
    }
    const auto& b = params.impact[m];
    if (b.rows() != spec.d || b.cols() != spec.d || !b.allFinite()) return false;
  }
  if (!shock_params_valid(params.nu, params.lambda)) return false;
  try {
    validate(spec.weights, params.weights);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

}  // namespace

LoglikValue structural_loglik(const Eigen::Ref<const MatrixXd>& u, const Eigen::Ref<const MatrixXd>& weights,
                              const std::vector<MatrixXd>& impact, const Eigen::Ref<const VectorXd>& nu,
                              const Eigen::Ref<const VectorXd>& lambda) {
  if (impact.empty() || static_cast<Index>(impact.size()) != weights.cols() || weights.rows() != u.rows()) {
    throw ShapeError("structural_loglik: inconsistent shapes");
  }
  if (!shock_params_valid(nu, lambda)) return {};
  for (const auto& b : impact) {
    if (!b.allFinite()) return {};
  }
  std::vector<SkewTParams> dists;
  for (Index i = 0; i < nu.size(); ++i) dists.emplace_back(nu(i), lambda(i));
  const MatrixXd ut = u.transpose();
  switch (u.cols()) {
    case 2: return structural_kernel<2>(ut, weights, impact, dists);
    case 3: return structural_kernel<3>(ut, weights, impact, dists);
    case 4: return structural_kernel<4>(ut, weights, impact, dists);
    default: return structural_kernel<Eigen::Dynamic>(ut, weights, impact, dists);
  }
}

Objective::Objective(ModelSpec spec, const Dataset& data, PenaltyConfig cfg)
    : spec_(std::move(spec)), design_(make_design(spec_, data)), cfg_(cfg) {
  spec_.validate();
  cfg_.validate();
}

LoglikValue Objective::loglik(const Params& params) const {
  if (!params_valid(spec_, params)) return {};
  const MatrixXd weights = weight_path(spec_, params, design_);
  const MatrixXd u = design_.y - cond_mean_path(params, design_, weights);
  if (!u.allFinite()) return {};
  return structural_loglik(u, weights, params.impact, params.nu, params.lambda);
}

double Objective::penalty(const Params& params) const {
  return cfg_.kappa * static_cast<double>(periods()) * static_cast<double>(spec_.d) *
         stability_excess(params, cfg_.eta);
}

double Objective::pen_loglik(const Params& params) const {
  const LoglikValue ll = loglik(params);
  if (!ll.ok()) return kRejected;
  const double pen = penalty(params);
  if (!std::isfinite(pen)) return kRejected;
  return ll.value - pen;
}

LoglikValue loglik(const ModelSpec& spec, const Params& params, const Dataset& data) {
  return Objective(spec, data).loglik(params);
}

double pen_loglik(const ModelSpec& spec, const Params& params, const Dataset& data, const PenaltyConfig& cfg) {
  return Objective(spec, data, cfg).pen_loglik(params);
}

double nls_objective(const ModelSpec& spec, const Params& params, const Dataset& data) {
  const Design design = make_design(spec, data);
  const MatrixXd weights = weight_path(spec, params, design);
  return (design.y - cond_mean_path(params, design, weights)).squaredNorm();
}

double pnls_objective(double q, double rss_hat, const std::vector<VectorXd>& moduli, const PenaltyConfig& cfg) {
  return q + cfg.kappa * rss_hat * stability_excess(moduli, cfg.eta);
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kMaxLogShape = 30.0;
constexpr double kMaxAtanh = 15.0;
constexpr double kMaxLogScale = 20.0;
}  // namespace

ParamCoder::ParamCoder(const ModelSpec& spec, FreeBlocks blocks) : spec_(spec), blocks_(blocks) {
  const Index d = spec.d;
  if (blocks.ar) size_ += spec.M * (d + d * d * spec.p);
  if (blocks.impact) size_ += spec.M * d * d;
  if (blocks.weights && spec.weights.kind == WeightKind::logistic) size_ += 2;
  if (blocks.shape) size_ += 2 * d;
}

VectorXd ParamCoder::encode(const Params& params) const {
  VectorXd x(size_);
  Index k = 0;
  const Index d = spec_.d;
  auto put = [&](const auto& block) {
    const VectorXd v = vec(block);
    x.segment(k, v.size()) = v;
    k += v.size();
  };
  if (blocks_.ar) {
    for (Index m = 0; m < spec_.M; ++m) {
      put(params.phi[static_cast<std::size_t>(m)]);
      for (const auto& a : params.ar[static_cast<std::size_t>(m)]) put(a);
    }
  }
  if (blocks_.impact) {
    for (const auto& b : params.impact) put(b);
  }
  if (blocks_.weights && spec_.weights.kind == WeightKind::logistic) {
    x(k++) = params.weights.location;
    x(k++) = std::log(params.weights.scale);
  }
  if (blocks_.shape) {
    for (Index i = 0; i < d; ++i) x(k++) = std::min(std::log(params.nu(i) - 2.0), kMaxLogShape);
    for (Index i = 0; i < d; ++i) x(k++) = std::atanh(std::clamp(params.lambda(i), -std::tanh(kMaxAtanh), std::tanh(kMaxAtanh)));
  }
  return x;
}

Params ParamCoder::decode(const Eigen::Ref<const VectorXd>& x, const Params& base) const {
  if (x.size() != size_) throw ShapeError("ParamCoder::decode: wrong coordinate count");
  Params out = base;
  Index k = 0;
  const Index d = spec_.d;
  auto take = [&](Index rows, Index cols) {
    MatrixXd block = unvec(x.segment(k, rows * cols), rows, cols);
    k += rows * cols;
    return block;
  };
  if (blocks_.ar) {
    for (Index m = 0; m < spec_.M; ++m) {
      const auto mi = static_cast<std::size_t>(m);
      out.phi[mi] = take(d, 1);
      for (auto& a : out.ar[mi]) a = take(d, d);
    }
  }
  if (blocks_.impact) {
    for (auto& b : out.impact) b = take(d, d);
  }
  if (blocks_.weights && spec_.weights.kind == WeightKind::logistic) {
    out.weights.location = x(k++);
    out.weights.scale = std::exp(std::clamp(x(k++), -kMaxLogScale, kMaxLogScale));
  }
  if (blocks_.shape) {
    for (Index i = 0; i < d; ++i) out.nu(i) = 2.0 + std::exp(std::clamp(x(k++), -kMaxLogShape, kMaxLogShape));
    for (Index i = 0; i < d; ++i) out.lambda(i) = std::tanh(std::clamp(x(k++), -kMaxAtanh, kMaxAtanh));
  }
  return out;
}

GradientResult loglik_gradient(const Objective& objective, const ParamCoder& coder, const Params& params) {
  const auto f = [&](const VectorXd& x) { return objective.pen_loglik(coder.decode(x, params)); };
  return numerical_gradient(f, coder.encode(params));
}

}  // namespace stvar
