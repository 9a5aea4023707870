#pragma once

// Core quantum state types and operations on them.
//
// Conventions used throughout the library:
//  - qubit 0 is the most significant bit of a basis index, so a basis state
//    |q0 q1 ... q_{n-1}> has index q0*2^{n-1} + ... + q_{n-1},
//  - states and operators are dense, capped at 12 qubits,
//  - global phase is physical state and is never normalized away.

#include <eqgan/linalg.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqgan {

inline constexpr int kMaxQubits = 12;
inline constexpr double kStateTol = 1e-10;

namespace detail {

inline void check_qubit_count(int n_qubits, const char* what) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument(std::string(what) + ": n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n_qubits));
}

inline Eigen::Index dim_for(int n_qubits) { return Eigen::Index(1) << n_qubits; }

/// Bit of qubit `q` inside basis index `idx` of an `n`-qubit register.
inline int qubit_bit(Eigen::Index idx, int n, int q) {
  return static_cast<int>((idx >> (n - 1 - q)) & 1);
}

}  // namespace detail

/// Pure state of an n-qubit register, stored as a dense amplitude vector.
template <typename Scalar = double>
class BasicStateVector {
 public:
  using Complex = ComplexT<Scalar>;
  using Vector = VectorT<Scalar>;

  BasicStateVector(int n_qubits, Vector amplitudes)
      : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    detail::check_qubit_count(n_qubits_, "StateVector");
    if (amps_.size() != detail::dim_for(n_qubits_))
      throw std::invalid_argument("StateVector: amplitude vector has dimension " +
                                  std::to_string(amps_.size()) + ", expected 2^" +
                                  std::to_string(n_qubits_));
    Scalar nrm = amps_.norm();
    if (std::abs(nrm - Scalar(1)) > Scalar(kStateTol))
      throw std::invalid_argument("StateVector: norm deviates from 1 by more than 1e-10");
    amps_ /= nrm;
  }

  static BasicStateVector zero_state(int n_qubits) { return basis_state(n_qubits, 0); }

  static BasicStateVector basis_state(int n_qubits, Eigen::Index basis_index) {
    detail::check_qubit_count(n_qubits, "StateVector");
    Eigen::Index dim = detail::dim_for(n_qubits);
    if (basis_index < 0 || basis_index >= dim)
      throw std::invalid_argument("StateVector: basis index out of range");
    Vector v = Vector::Zero(dim);
    v(basis_index) = Complex(1, 0);
    return BasicStateVector(n_qubits, std::move(v));
  }

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }

 private:
  int n_qubits_;
  Vector amps_;
};

/// Mixed state of an n-qubit register. Construction validates hermiticity,
/// unit trace and positive semidefiniteness (eigenvalues >= -1e-10).
template <typename Scalar = double>
class BasicDensityMatrix {
 public:
  using Complex = ComplexT<Scalar>;
  using Matrix = MatrixT<Scalar>;

  BasicDensityMatrix(int n_qubits, Matrix rho) : n_qubits_(n_qubits), rho_(std::move(rho)) {
    detail::check_qubit_count(n_qubits_, "DensityMatrix");
    Eigen::Index dim = detail::dim_for(n_qubits_);
    if (rho_.rows() != dim || rho_.cols() != dim)
      throw std::invalid_argument("DensityMatrix: matrix must be 2^n x 2^n for n = " +
                                  std::to_string(n_qubits_));
    if (!is_hermitian(rho_, kStateTol))
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian within 1e-10");
    if (std::abs(rho_.trace().real() - Scalar(1)) > Scalar(kStateTol) ||
        std::abs(rho_.trace().imag()) > Scalar(kStateTol))
      throw std::invalid_argument("DensityMatrix: trace deviates from 1 by more than 1e-10");
    rho_ = ((rho_ + rho_.adjoint()) / Scalar(2)).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -Scalar(kStateTol))
      throw std::invalid_argument(
          "DensityMatrix: negative eigenvalue below -1e-10, matrix is not PSD");
  }

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }

 private:
  int n_qubits_;
  Matrix rho_;
};

/// Hermitian observable or measurement operator on an n-qubit register.
template <typename Scalar = double>
class BasicHermitianOperator {
 public:
  using Complex = ComplexT<Scalar>;
  using Matrix = MatrixT<Scalar>;

  BasicHermitianOperator(int n_qubits, Matrix m) : n_qubits_(n_qubits), m_(std::move(m)) {
    detail::check_qubit_count(n_qubits_, "HermitianOperator");
    Eigen::Index dim = detail::dim_for(n_qubits_);
    if (m_.rows() != dim || m_.cols() != dim)
      throw std::invalid_argument("HermitianOperator: matrix must be 2^n x 2^n for n = " +
                                  std::to_string(n_qubits_));
    if (!is_hermitian(m_, kStateTol))
      throw std::invalid_argument("HermitianOperator: matrix is not Hermitian within 1e-10");
    m_ = ((m_ + m_.adjoint()) / Scalar(2)).eval();
  }

  int n_qubits() const { return n_qubits_; }
  const Matrix& matrix() const { return m_; }

 private:
  int n_qubits_;
  Matrix m_;
};

using StateVector = BasicStateVector<double>;
using DensityMatrix = BasicDensityMatrix<double>;
using HermitianOperator = BasicHermitianOperator<double>;

/// Rank-1 density matrix |psi><psi| of a pure state.
template <typename Scalar>
BasicDensityMatrix<Scalar> to_density(const BasicStateVector<Scalar>& psi) {
  MatrixT<Scalar> rho = psi.amplitudes() * psi.amplitudes().adjoint();
  return BasicDensityMatrix<Scalar>(psi.n_qubits(), std::move(rho));
}

/// |<a|b>|^2 for two pure states of equal width.
template <typename Scalar>
Scalar fidelity_pure(const BasicStateVector<Scalar>& a, const BasicStateVector<Scalar>& b) {
  if (a.n_qubits() != b.n_qubits())
    throw std::invalid_argument("fidelity_pure: qubit count mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

/// Uhlmann fidelity (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2.
template <typename Scalar>
Scalar fidelity_mixed(const BasicDensityMatrix<Scalar>& rho,
                      const BasicDensityMatrix<Scalar>& sigma) {
  if (rho.n_qubits() != sigma.n_qubits())
    throw std::invalid_argument("fidelity_mixed: qubit count mismatch");
  MatrixT<Scalar> s = matrix_sqrt_psd<Scalar>(sigma.matrix());
  MatrixT<Scalar> inner = s * rho.matrix() * s;
  Scalar tr = matrix_sqrt_psd<Scalar>(inner).trace().real();
  return tr * tr;
}

/// Projector onto the strictly positive eigenspace of (sigma - rho),
/// the optimal Helstrom measurement for distinguishing sigma from rho.
/// Eigenvalues are counted as positive when they exceed `threshold`.
template <typename Scalar>
BasicHermitianOperator<Scalar> helstrom_positive(const BasicDensityMatrix<Scalar>& sigma,
                                                 const BasicDensityMatrix<Scalar>& rho,
                                                 double threshold = 1e-10) {
  if (sigma.n_qubits() != rho.n_qubits())
    throw std::invalid_argument("helstrom_positive: qubit count mismatch");
  MatrixT<Scalar> diff = sigma.matrix() - rho.matrix();
  Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> es(diff);
  MatrixT<Scalar> proj = MatrixT<Scalar>::Zero(diff.rows(), diff.cols());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > Scalar(threshold))
      proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return BasicHermitianOperator<Scalar>(sigma.n_qubits(), std::move(proj));
}

/// Single-qubit density matrix (I + x X + y Y + z Z) / 2 from Bloch coordinates.
template <typename Scalar = double>
BasicDensityMatrix<Scalar> bloch_to_density(Scalar x, Scalar y, Scalar z) {
  if (x * x + y * y + z * z > Scalar(1) + Scalar(1e-12))
    throw std::invalid_argument("bloch_to_density: Bloch vector norm exceeds 1");
  MatrixT<Scalar> rho =
      (MatrixT<Scalar>::Identity(2, 2) + x * pauli_x<Scalar>() + y * pauli_y<Scalar>() +
       z * pauli_z<Scalar>()) /
      Scalar(2);
  return BasicDensityMatrix<Scalar>(1, std::move(rho));
}

/// Partial trace keeping the qubits listed in `keep` (strictly ascending).
/// Kept qubits preserve their relative order in the result.
template <typename Scalar>
BasicDensityMatrix<Scalar> partial_trace(const BasicDensityMatrix<Scalar>& rho,
                                         const std::vector<int>& keep) {
  const int n = rho.n_qubits();
  if (keep.empty())
    throw std::invalid_argument("partial_trace: keep set must contain at least one qubit");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n)
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep indices must be strictly ascending");
  }
  if (static_cast<int>(keep.size()) == n) return rho;

  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);

  const int m = static_cast<int>(keep.size());
  const int t = static_cast<int>(traced.size());
  const Eigen::Index out_dim = Eigen::Index(1) << m;
  const Eigen::Index env_dim = Eigen::Index(1) << t;

  // Assemble a full basis index from the kept part `a` and traced part `e`.
  auto full_index = [&](Eigen::Index a, Eigen::Index e) {
    Eigen::Index idx = 0;
    for (int i = 0; i < m; ++i)
      idx |= ((a >> (m - 1 - i)) & 1) << (n - 1 - keep[i]);
    for (int i = 0; i < t; ++i)
      idx |= ((e >> (t - 1 - i)) & 1) << (n - 1 - traced[i]);
    return idx;
  };

  MatrixT<Scalar> out = MatrixT<Scalar>::Zero(out_dim, out_dim);
  for (Eigen::Index a = 0; a < out_dim; ++a)
    for (Eigen::Index b = 0; b < out_dim; ++b)
      for (Eigen::Index e = 0; e < env_dim; ++e)
        out(a, b) += rho.matrix()(full_index(a, e), full_index(b, e));
  return BasicDensityMatrix<Scalar>(m, std::move(out));
}

/// Tr[obs * rho], validated to be real within 1e-10.
template <typename Scalar>
Scalar expectation(const BasicDensityMatrix<Scalar>& rho,
                   const BasicHermitianOperator<Scalar>& obs) {
  if (rho.n_qubits() != obs.n_qubits())
    throw std::invalid_argument("expectation: qubit count mismatch");
  ComplexT<Scalar> tr = (obs.matrix() * rho.matrix()).trace();
  if (std::abs(tr.imag()) > Scalar(kStateTol))
    throw std::runtime_error("expectation: trace has imaginary part above 1e-10");
  return tr.real();
}

}  // namespace eqgan
