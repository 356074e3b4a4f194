#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stvar {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Relative determinant below which a matrix is treated as singular.
inline constexpr double kSingularityTol = 1e-12;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative kernel failed to converge.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, Index iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  Index iterations() const noexcept { return iterations_; }

 private:
  Index iterations_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(op) + ": expected a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

/// All eigenvalues (with multiplicity) of a real, possibly nonsymmetric matrix.
/// Hessenberg reduction followed by shifted QR (Eigen's real Schur).
template <typename Derived>
VectorXcd eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  require_square(m, "eigenvalues");
  if (m.rows() == 0) return {};
  if (!m.allFinite()) throw ShapeError("eigenvalues: non-finite entries");
  Eigen::EigenSolver<MatrixXd> solver;
  solver.compute(m.template cast<double>(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    const Index iters = Eigen::RealSchur<MatrixXd>::m_maxIterationsPerRow * m.rows();
    throw NumericError("eigenvalues: QR iteration did not converge", iters);
  }
  return solver.eigenvalues();
}

template <typename Derived>
VectorXd eigenvalue_moduli(const Eigen::MatrixBase<Derived>& m) {
  return eigenvalues(m).cwiseAbs();
}

template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return 0.0;
  return eigenvalue_moduli(m).maxCoeff();
}

/// Determinant via partial-pivot LU.
template <typename Derived>
double det(const Eigen::MatrixBase<Derived>& m) {
  require_square(m, "det");
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<MatrixXd>(m.template cast<double>()).determinant();
}

/// |det(m)| divided by the product of the row norms (Hadamard ratio, in [0, 1]).
template <typename Derived>
double relative_determinant(const Eigen::MatrixBase<Derived>& m) {
  require_square(m, "relative_determinant");
  const VectorXd norms = m.template cast<double>().rowwise().norm();
  const double scale = norms.prod();
  if (!(scale > 0.0)) return 0.0;
  return std::abs(det(m)) / scale;
}

template <typename Derived>
bool is_singular(const Eigen::MatrixBase<Derived>& m, double tol = kSingularityTol) {
  return !(relative_determinant(m) >= tol);
}

/// Solves m * x = rhs.
template <typename DerivedA, typename DerivedB>
MatrixXd solve(const Eigen::MatrixBase<DerivedA>& m, const Eigen::MatrixBase<DerivedB>& rhs) {
  require_square(m, "solve");
  if (rhs.rows() != m.rows()) {
    throw ShapeError("solve: rhs has " + std::to_string(rhs.rows()) + " rows, expected " +
                     std::to_string(m.rows()));
  }
  if (is_singular(m)) throw SingularMatrixError("solve: matrix is singular to working precision");
  return Eigen::PartialPivLU<MatrixXd>(m.template cast<double>()).solve(rhs.template cast<double>());
}

/// Column-stacking vectorization.
template <typename Derived>
VectorXd vec(const Eigen::MatrixBase<Derived>& m) {
  MatrixXd copy = m.template cast<double>();
  return Eigen::Map<const VectorXd>(copy.data(), copy.size());
}

inline MatrixXd unvec(const Eigen::Ref<const VectorXd>& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw ShapeError("unvec: size mismatch");
  return Eigen::Map<const MatrixXd>(v.data(), rows, cols);
}

/// Largest singular value.
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m.template cast<double>());
  return svd.singularValues()(0);
}

}  // namespace stvar
