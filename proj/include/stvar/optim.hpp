#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "stvar/linalg.hpp"

namespace stvar {

/// Objective to maximize; non-finite values mark infeasible points.
using ScalarFunction = std::function<double(const VectorXd&)>;

struct GradientResult {
  VectorXd gradient;
  std::vector<Index> failed;  // coordinates where a probe point was rejected
  bool ok() const { return failed.empty(); }
};

/// Central differences with per-coordinate step h_i = max(1e-6, 1e-7 |x_i|) * step_scale.
GradientResult numerical_gradient(const ScalarFunction& f, const VectorXd& x,
                                  double step_scale = 1.0);

/// Richardson-extrapolated central differences from steps h and h/2.
GradientResult richardson_gradient(const ScalarFunction& f, const VectorXd& x);

struct RefineOptions {
  double gradient_tol = 1e-5;
  double step_tol = 1e-9;
  /// Relative change in the objective over one iteration treated as a stall.
  double value_tol = 1e-12;
  Index max_iterations = 500;
  Index line_search_failures = 2;
  Index simplex_evaluations = 4000;
};

struct RefineResult {
  VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
  double initial_value = -std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();
  Index iterations = 0;
  Index evaluations = 0;
  bool converged = false;
  bool used_simplex = false;
};

/// BFGS with central-difference gradients and backtracking line search,
/// falling back to Nelder-Mead after repeated line-search failures.
/// The returned value is never below the starting value.
RefineResult maximize(const ScalarFunction& f, const VectorXd& x0, const RefineOptions& options = {});

/// Nelder-Mead simplex search for a maximum.
RefineResult nelder_mead(const ScalarFunction& f, const VectorXd& x0, Index max_evaluations,
                         double initial_step = 0.1, double tol = 1e-10);

}  // namespace stvar
