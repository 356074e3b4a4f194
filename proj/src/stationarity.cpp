#include "stvar/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace stvar {

StabilityReport stability_check(const Params& params) {
  StabilityReport report;
  report.stable = true;
  for (Index m = 0; m < params.regimes(); ++m) {
    VectorXd moduli = eigenvalue_moduli(companion(params, m));
    const double rho = moduli.size() ? moduli.maxCoeff() : 0.0;
    report.stable = report.stable && rho < 1.0;
    report.max_modulus.push_back(rho);
    report.moduli.push_back(std::move(moduli));
  }
  return report;
}

namespace {

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

double max_norm(const std::vector<MatrixXd>& set) {
  double out = 0.0;
  for (const auto& a : set) out = std::max(out, spectral_norm(a));
  return out;
}

// Similarity transforms L' A L^{-T} where P = L L' solves
// P - sum_i A_i' P A_i / r^2 = I for r^2 slightly above rho(sum_i A_i (x) A_i).
// Each transformed matrix then has spectral norm <= r. Any invertible
// transform yields valid bounds, so the candidate with the smallest maximal
// norm is kept.
std::vector<MatrixXd> precondition(const std::vector<MatrixXd>& set) {
  const Index n = set.front().rows();
  if (n > 24) return set;
  MatrixXd lifted = MatrixXd::Zero(n * n, n * n);
  for (const auto& a : set) lifted += kron(a, a);
  const double rho_kron = spectral_radius(lifted);
  if (!(rho_kron > 0.0)) return set;

  MatrixXd lifted_t = MatrixXd::Zero(n * n, n * n);
  for (const auto& a : set) lifted_t += kron(a.transpose(), a.transpose());
  const VectorXd vec_identity = vec(MatrixXd::Identity(n, n));

  std::vector<MatrixXd> best = set;
  double best_norm = max_norm(set);
  for (const double factor : {1.0001, 1.001, 1.01, 1.05, 1.2}) {
    const double r2 = rho_kron * factor * factor;
    const MatrixXd system = MatrixXd::Identity(n * n, n * n) - lifted_t / r2;
    const VectorXd p_vec = Eigen::PartialPivLU<MatrixXd>(system).solve(vec_identity);
    MatrixXd p = unvec(p_vec, n, n);
    p = 0.5 * (p + p.transpose()).eval();
    Eigen::LLT<MatrixXd> llt(p);
    if (llt.info() != Eigen::Success || !p.allFinite()) continue;
    const MatrixXd l = llt.matrixL();
    const MatrixXd lt = l.transpose();
    std::vector<MatrixXd> candidate;
    for (const auto& a : set) {
      // L' A L^{-T} = (L^{-1} (L' A)')'
      const MatrixXd left = lt * a;
      candidate.push_back(l.triangularView<Eigen::Lower>().solve(left.transpose()).transpose());
    }
    const double norm = max_norm(candidate);
    if (std::isfinite(norm) && norm < best_norm) {
      best_norm = norm;
      best = std::move(candidate);
    }
  }
  return best;
}

struct Node {
  MatrixXd product;
  double value;  // min over prefixes of ||prefix||^{1/len}
  Index depth;
  Index id;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.value != b.value) return a.value < b.value;
    return a.id > b.id;
  }
};

}  // namespace

JsrBound jsr_bounds(const std::vector<MatrixXd>& matrices, const JsrOptions& options) {
  if (matrices.empty()) throw std::invalid_argument("jsr_bounds: empty matrix set");
  const Index n = matrices.front().rows();
  for (const auto& a : matrices) {
    require_square(a, "jsr_bounds");
    if (a.rows() != n) throw ShapeError("jsr_bounds: matrices differ in dimension");
  }
  const std::vector<MatrixXd> set = options.precondition ? precondition(matrices) : matrices;

  JsrBound out;
  out.tolerance = options.tol;
  double lower = 0.0;
  double pruned_max = 0.0;  // values of leaves cut off from the tree
  double capped_max = 0.0;  // values of leaves at the depth cap
  Index next_id = 0;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> frontier;

  for (const auto& a : set) {
    lower = std::max(lower, spectral_radius(a));
    frontier.push(Node{a, spectral_norm(a), 1, next_id++});
  }
  out.products_explored = static_cast<Index>(set.size());
  out.depth_reached = 1;

  auto current_upper = [&] {
    double upper = std::max(pruned_max, capped_max);
    if (!frontier.empty()) upper = std::max(upper, frontier.top().value);
    return std::max(upper, lower);
  };
  out.history.emplace_back(lower, current_upper());

  while (!frontier.empty()) {
    const Node& top = frontier.top();
    if (top.value <= lower + options.tol) break;
    if (out.products_explored >= options.budget) break;
    Node node = top;
    frontier.pop();
    if (node.depth >= options.max_depth) {
      capped_max = std::max(capped_max, node.value);
      continue;
    }
    const Index depth = node.depth + 1;
    const double inv_depth = 1.0 / static_cast<double>(depth);
    for (const auto& a : set) {
      MatrixXd product = node.product * a;
      ++out.products_explored;
      lower = std::max(lower, std::pow(spectral_radius(product), inv_depth));
      const double value = std::min(node.value, std::pow(spectral_norm(product), inv_depth));
      if (value <= lower + options.tol) {
        pruned_max = std::max(pruned_max, value);
      } else {
        frontier.push(Node{std::move(product), value, depth, next_id++});
      }
    }
    if (depth > out.depth_reached) {
      out.depth_reached = depth;
      out.history.emplace_back(lower, current_upper());
    }
  }

  out.lower = lower;
  out.upper = current_upper();
  out.history.emplace_back(out.lower, out.upper);
  out.converged = out.upper - out.lower <= options.tol;
  return out;
}

B1B2Check logistic_b1b2_check(const MatrixXd& b1, const MatrixXd& b2) {
  B1B2Check out;
  out.eigenvalues = eigenvalues(solve(b1, b2));
  out.pass = true;
  for (Index i = 0; i < out.eigenvalues.size(); ++i) {
    const auto z = out.eigenvalues(i);
    if (std::abs(z.imag()) <= 1e-10 && z.real() < 0.0) out.pass = false;
  }
  return out;
}

ErgodicReport ergodic_report(const ModelSpec& spec, const Params& params, const JsrOptions& options) {
  ErgodicReport report;
  report.stability = stability_check(params);
  if (spec.weights.kind == WeightKind::logistic) {
    report.b1b2 = logistic_b1b2_check(params.impact.at(0), params.impact.at(1));
  }
  if (!report.stability.stable) {
    report.verdict = "necessary condition fails: a regime has spectral radius >= 1";
    return report;
  }
  report.jsr = jsr_bounds(companions(params), options);
  if (report.b1b2 && !report.b1b2->pass) {
    report.verdict = "inv(B1)*B2 has a negative real eigenvalue";
    return report;
  }
  if (spec.weights.kind == WeightKind::exogenous) {
    report.verdict = "sufficient condition applies only to logistic or threshold weights";
    return report;
  }
  if (report.jsr->upper < 1.0) {
    report.verified = true;
    report.verdict = "sufficient condition verified";
  } else {
    report.verdict = "inconclusive: joint spectral radius upper bound is not below one";
  }
  return report;
}

}  // namespace stvar
