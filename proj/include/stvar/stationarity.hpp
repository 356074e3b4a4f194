#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stvar/linalg.hpp"
#include "stvar/model.hpp"

namespace stvar {

/// dp x dp companion matrix of regime m: [A_{m,1} ... A_{m,p}] on top,
/// identity blocks on the first block subdiagonal.
template <typename Scalar>
Matrix<Scalar> companion(const BasicParams<Scalar>& params, Index m) {
  const auto& ar = params.ar.at(static_cast<std::size_t>(m));
  const Index p = static_cast<Index>(ar.size());
  const Index d = p > 0 ? ar.front().rows() : params.dim();
  Matrix<Scalar> out = Matrix<Scalar>::Zero(d * p, d * p);
  for (Index i = 0; i < p; ++i) out.block(0, i * d, d, d) = ar[static_cast<std::size_t>(i)];
  if (p > 1) out.bottomLeftCorner(d * (p - 1), d * (p - 1)).setIdentity();
  return out;
}

template <typename Scalar>
std::vector<Matrix<Scalar>> companions(const BasicParams<Scalar>& params) {
  std::vector<Matrix<Scalar>> out;
  for (Index m = 0; m < params.regimes(); ++m) out.push_back(companion(params, m));
  return out;
}

struct StabilityReport {
  std::vector<VectorXd> moduli;     // all dp eigenvalue moduli per regime
  std::vector<double> max_modulus;  // spectral radius per regime
  bool stable = false;              // every regime strictly inside the unit circle
};

StabilityReport stability_check(const Params& params);

struct JsrOptions {
  double tol = 5e-3;
  Index max_depth = 20;
  Index budget = 2'000'000;
  /// Search for an ellipsoidal norm that tightens the initial upper bound.
  bool precondition = true;
};

struct JsrBound {
  double lower = 0.0;
  double upper = 0.0;
  double tolerance = 0.0;
  Index products_explored = 0;
  Index depth_reached = 0;
  bool converged = false;
  /// (lower, upper) after each completed expansion depth.
  std::vector<std::pair<double, double>> history;
};

/// Bounds on the joint spectral radius by Gripenberg's branch and bound:
/// lower = max rho(P)^{1/k} over explored products, upper = max over a cut of
/// the product tree of min_j ||prefix_j||^{1/j}. Always lower <= JSR <= upper.
JsrBound jsr_bounds(const std::vector<MatrixXd>& matrices, const JsrOptions& options = {});

struct B1B2Check {
  bool pass = false;
  VectorXcd eigenvalues;
};

/// Fails iff inv(B1) * B2 has a real (|imag| <= 1e-10) negative eigenvalue.
B1B2Check logistic_b1b2_check(const MatrixXd& b1, const MatrixXd& b2);

struct ErgodicReport {
  StabilityReport stability;
  std::optional<JsrBound> jsr;
  std::optional<B1B2Check> b1b2;
  bool verified = false;
  std::string verdict;
};

ErgodicReport ergodic_report(const ModelSpec& spec, const Params& params, const JsrOptions& options = {});

}  // namespace stvar
