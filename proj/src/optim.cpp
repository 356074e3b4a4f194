#include "stvar/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stvar {

GradientResult numerical_gradient(const ScalarFunction& f, const VectorXd& x,
                                  double step_scale) {
  GradientResult out;
  out.gradient = VectorXd::Zero(x.size());
  VectorXd probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = std::max(1e-6, 1e-7 * std::abs(x(i))) * step_scale;
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      out.failed.push_back(i);
      continue;
    }
    out.gradient(i) = (up - down) / (2.0 * h);
  }
  return out;
}

GradientResult richardson_gradient(const ScalarFunction& f, const VectorXd& x) {
  GradientResult coarse = numerical_gradient(f, x, 1.0);
  GradientResult fine = numerical_gradient(f, x, 0.5);
  GradientResult out;
  out.gradient = (4.0 * fine.gradient - coarse.gradient) / 3.0;
  out.failed = coarse.failed;
  for (Index i : fine.failed) {
    if (std::find(out.failed.begin(), out.failed.end(), i) == out.failed.end()) out.failed.push_back(i);
  }
  std::sort(out.failed.begin(), out.failed.end());
  return out;
}

namespace {

constexpr double kArmijo = 1e-4;

// Counts evaluations and maps non-finite values to -inf.
struct Counted {
  const ScalarFunction& f;
  Index calls = 0;
  double operator()(const VectorXd& x) {
    ++calls;
    const double v = f(x);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  }
};

}  // namespace

RefineResult nelder_mead(const ScalarFunction& f, const VectorXd& x0, Index max_evaluations, double initial_step,
                         double tol) {
  Counted eval{f};
  const Index n = x0.size();
  RefineResult out;
  out.used_simplex = true;
  std::vector<VectorXd> simplex{x0};
  std::vector<double> values{eval(x0)};
  out.initial_value = values[0];
  for (Index i = 0; i < n; ++i) {
    VectorXd v = x0;
    v(i) += initial_step * std::max(1.0, std::abs(x0(i)));
    simplex.push_back(v);
    values.push_back(eval(v));
  }
  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<VectorXd> s;
    std::vector<double> v;
    for (std::size_t k : order) {
      s.push_back(simplex[k]);
      v.push_back(values[k]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  while (eval.calls < max_evaluations) {
    sort_simplex();
    ++out.iterations;
    const double best = values.front();
    const double worst = values.back();
    double size = 0.0;
    for (std::size_t k = 1; k < simplex.size(); ++k) size = std::max(size, (simplex[k] - simplex[0]).lpNorm<Eigen::Infinity>());
    if (std::isfinite(worst) && best - worst <= tol * (1.0 + std::abs(best)) && size <= 1e-8) {
      out.converged = true;
      break;
    }
    VectorXd centroid = VectorXd::Zero(n);
    for (Index k = 0; k < n; ++k) centroid += simplex[static_cast<std::size_t>(k)];
    centroid /= static_cast<double>(n);
    const VectorXd& w = simplex.back();
    const VectorXd reflected = centroid + (centroid - w);
    const double fr = eval(reflected);
    const double second_worst = values[values.size() - 2];
    if (fr > best) {
      const VectorXd expanded = centroid + 2.0 * (centroid - w);
      const double fe = eval(expanded);
      if (fe > fr) {
        simplex.back() = expanded;
        values.back() = fe;
      } else {
        simplex.back() = reflected;
        values.back() = fr;
      }
      continue;
    }
    if (fr > second_worst) {
      simplex.back() = reflected;
      values.back() = fr;
      continue;
    }
    const bool outside = fr > worst;
    const VectorXd contracted = outside ? VectorXd(centroid + 0.5 * (reflected - centroid))
                                        : VectorXd(centroid + 0.5 * (w - centroid));
    const double fc = eval(contracted);
    if (outside ? fc >= fr : fc > worst) {
      simplex.back() = contracted;
      values.back() = fc;
      continue;
    }
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      simplex[k] = simplex[0] + 0.5 * (simplex[k] - simplex[0]);
      values[k] = eval(simplex[k]);
    }
  }
  sort_simplex();
  out.x = simplex.front();
  out.value = values.front();
  out.evaluations = eval.calls;
  return out;
}

RefineResult maximize(const ScalarFunction& f, const VectorXd& x0, const RefineOptions& options) {
  Counted eval{f};
  const Index n = x0.size();
  RefineResult out;
  VectorXd x = x0;
  double fx = eval(x);
  out.initial_value = fx;
  out.x = x;
  out.value = fx;
  if (!std::isfinite(fx)) return out;

  auto gradient = [&](const VectorXd& at) {
    GradientResult g = numerical_gradient([&](const VectorXd& p) { return eval(p); }, at);
    return g;
  };
  GradientResult g = gradient(x);
  MatrixXd h = MatrixXd::Identity(n, n);  // inverse Hessian of -f
  bool identity = true;
  Index failures = 0;
  bool fall_back = !g.ok();

  while (!fall_back && out.iterations < options.max_iterations) {
    out.gradient_norm = g.gradient.lpNorm<Eigen::Infinity>();
    if (out.gradient_norm < options.gradient_tol) {
      out.converged = true;
      break;
    }
    VectorXd dir = h * g.gradient;  // ascent direction
    double slope = dir.dot(g.gradient);
    if (!(slope > 0.0)) {
      h.setIdentity();
      identity = true;
      dir = g.gradient;
      slope = dir.squaredNorm();
    }
    const double dir_norm = dir.lpNorm<Eigen::Infinity>();
    double t = std::min(1.0, 1.0 / dir_norm);
    VectorXd xn;
    double fn = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    while (t * dir_norm >= options.step_tol) {
      xn = x + t * dir;
      fn = eval(xn);
      if (fn >= fx + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      if (!identity) {
        h.setIdentity();
        identity = true;
        continue;
      }
      if (++failures >= options.line_search_failures) {
        fall_back = true;
        break;
      }
      continue;
    }
    const VectorXd s = xn - x;
    GradientResult gn = gradient(xn);
    const double previous = fx;
    x = xn;
    fx = fn;
    if (!gn.ok()) {
      fall_back = true;
      break;
    }
    const VectorXd y = g.gradient - gn.gradient;  // gradient change of -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (identity) h *= sy / y.squaredNorm();
      const VectorXd hy = h * y;
      const double rho = 1.0 / sy;
      h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
      identity = false;
    }
    g = std::move(gn);
    if (s.lpNorm<Eigen::Infinity>() < options.step_tol ||
        std::abs(fx - previous) <= options.value_tol * (1.0 + std::abs(fx))) {
      out.gradient_norm = g.gradient.lpNorm<Eigen::Infinity>();
      out.converged = true;
      break;
    }
  }

  out.x = x;
  out.value = fx;
  if (fall_back) {
    RefineResult simplex = nelder_mead(f, x, options.simplex_evaluations);
    eval.calls += simplex.evaluations;
    out.used_simplex = true;
    out.converged = simplex.converged;
    if (simplex.value > fx) {
      out.x = simplex.x;
      out.value = simplex.value;
    }
  }
  out.evaluations = eval.calls;
  return out;
}

}  // namespace stvar
