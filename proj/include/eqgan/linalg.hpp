#pragma once

// Dense complex linear algebra helpers shared by the whole library.
// Everything here is templated on the real scalar type; the rest of the
// library instantiates double.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace eqgan {

template <typename Scalar = double>
using ComplexT = std::complex<Scalar>;

template <typename Scalar = double>
using MatrixT = Eigen::Matrix<ComplexT<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
using VectorT = Eigen::Matrix<ComplexT<Scalar>, Eigen::Dynamic, 1>;

using Complex = ComplexT<double>;
using Matrix = MatrixT<double>;
using Vector = VectorT<double>;

/// Kronecker product of two dense complex expressions.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
    -> Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
  using Out = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Out out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b.derived();
  return out;
}

template <typename DerivedA, typename DerivedB, typename DerivedC>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
          const Eigen::MatrixBase<DerivedC>& c) {
  return kron(kron(a, b), c);
}

template <typename Scalar = double>
MatrixT<Scalar> pauli_x() {
  MatrixT<Scalar> m(2, 2);
  m << ComplexT<Scalar>(0, 0), ComplexT<Scalar>(1, 0), ComplexT<Scalar>(1, 0),
      ComplexT<Scalar>(0, 0);
  return m;
}

template <typename Scalar = double>
MatrixT<Scalar> pauli_y() {
  MatrixT<Scalar> m(2, 2);
  m << ComplexT<Scalar>(0, 0), ComplexT<Scalar>(0, -1), ComplexT<Scalar>(0, 1),
      ComplexT<Scalar>(0, 0);
  return m;
}

template <typename Scalar = double>
MatrixT<Scalar> pauli_z() {
  MatrixT<Scalar> m(2, 2);
  m << ComplexT<Scalar>(1, 0), ComplexT<Scalar>(0, 0), ComplexT<Scalar>(0, 0),
      ComplexT<Scalar>(-1, 0);
  return m;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return (m.derived() - m.derived().adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  using Out = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Out prod = m.derived().adjoint() * m.derived();
  return (prod - Out::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in [-neg_tol, 0) are clamped to zero; anything more negative
/// throws, since the input is then not a valid PSD operator.
template <typename Scalar>
MatrixT<Scalar> matrix_sqrt_psd(const MatrixT<Scalar>& m, double neg_tol = 1e-10) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("matrix_sqrt_psd: matrix must be square");
  Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> es((m + m.adjoint()) / Scalar(2));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("matrix_sqrt_psd: eigendecomposition failed");
  auto evals = es.eigenvalues();
  VectorT<Scalar> roots(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    Scalar ev = evals(i);
    if (ev < -Scalar(neg_tol))
      throw std::invalid_argument(
          "matrix_sqrt_psd: eigenvalue " + std::to_string(static_cast<double>(ev)) +
          " below -" + std::to_string(neg_tol) + ", input is not PSD");
    roots(i) = ComplexT<Scalar>(ev > Scalar(0) ? std::sqrt(ev) : Scalar(0), 0);
  }
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

/// Trace distance between two Hermitian operators of equal dimension,
/// 0.5 * sum of |eigenvalues| of the difference.
template <typename Scalar>
Scalar trace_distance(const MatrixT<Scalar>& a, const MatrixT<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  MatrixT<Scalar> d = a - b;
  Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> es((d + d.adjoint()) / Scalar(2));
  return es.eigenvalues().cwiseAbs().sum() / Scalar(2);
}

}  // namespace eqgan
