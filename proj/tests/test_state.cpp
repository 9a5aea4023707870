#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <eqgan/state.hpp>

#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace eqgan;

namespace {

const double kPi = std::acos(-1.0);

StateVector plus_state() {
  Vector v(2);
  v << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
  return StateVector(1, v);
}

// Two single-qubit states thirty degrees above and below the Bloch x axis.
// Their fidelity is (1 + cos(pi/3)) / 2 = 3/4 and the difference sigma - rho
// points along +y, so the optimal distinguishing projector is (I + Y) / 2.
DensityMatrix tilted_sigma() {
  return bloch_to_density(std::cos(kPi / 6), std::sin(kPi / 6), 0.0);
}
DensityMatrix tilted_rho() {
  return bloch_to_density(std::cos(kPi / 6), -std::sin(kPi / 6), 0.0);
}

}  // namespace

TEST_CASE("state vector construction and validation") {
  StateVector z = StateVector::zero_state(2);
  CHECK(z.n_qubits() == 2);
  CHECK(z.dim() == 4);
  CHECK(z.amplitudes()(0) == Complex(1, 0));

  SUBCASE("norm off by more than 1e-10 is rejected") {
    Vector v(2);
    v << Complex(1, 0), Complex(1e-4, 0);
    CHECK_THROWS_AS(StateVector(1, v), std::invalid_argument);
  }
  SUBCASE("dimension must match qubit count") {
    Vector v = Vector::Zero(3);
    v(0) = Complex(1, 0);
    CHECK_THROWS_AS(StateVector(2, v), std::invalid_argument);
  }
  SUBCASE("qubit count capped at 12") {
    CHECK_THROWS_AS(StateVector::zero_state(13), std::invalid_argument);
    CHECK_THROWS_AS(StateVector::zero_state(0), std::invalid_argument);
  }
  SUBCASE("basis state index range") {
    CHECK_THROWS_AS(StateVector::basis_state(2, 4), std::invalid_argument);
    CHECK(StateVector::basis_state(2, 3).amplitudes()(3) == Complex(1, 0));
  }
}

TEST_CASE("density matrix validation") {
  SUBCASE("non-Hermitian rejected") {
    Matrix m(2, 2);
    m << Complex(0.5, 0), Complex(0.3, 0.1), Complex(0.1, 0.1), Complex(0.5, 0);
    CHECK_THROWS_AS(DensityMatrix(1, m), std::invalid_argument);
  }
  SUBCASE("trace must be 1") {
    Matrix m = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix(1, m), std::invalid_argument);
  }
  SUBCASE("negative eigenvalue beyond tolerance rejected") {
    Matrix m(2, 2);
    m << Complex(1.2, 0), Complex(0, 0), Complex(0, 0), Complex(-0.2, 0);
    CHECK_THROWS_AS(DensityMatrix(1, m), std::invalid_argument);
  }
  SUBCASE("tiny negative eigenvalue within tolerance accepted") {
    Matrix m(2, 2);
    m << Complex(1.0 + 1e-12, 0), Complex(0, 0), Complex(0, 0), Complex(-1e-12, 0);
    CHECK_NOTHROW(DensityMatrix(1, m));
  }
}

TEST_CASE("fidelity of pure states") {
  StateVector zero = StateVector::zero_state(1);
  StateVector one = StateVector::basis_state(1, 1);

  CHECK(fidelity_pure(zero, zero) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_pure(zero, one) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fidelity_pure(zero, plus_state()) == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("symmetric and phase-insensitive on random pairs") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
      int n = 1 + static_cast<int>(rng() % 3);
      StateVector a = testutil::haar_state(n, rng);
      StateVector b = testutil::haar_state(n, rng);
      double f = fidelity_pure(a, b);
      CHECK(f == doctest::Approx(fidelity_pure(b, a)).epsilon(1e-12));
      CHECK(f >= 0.0);
      CHECK(f <= 1.0 + 1e-12);
      Vector rotated = a.amplitudes() * std::exp(Complex(0, 0.7));
      StateVector a2(n, rotated);
      CHECK(fidelity_pure(a2, b) == doctest::Approx(f).epsilon(1e-12));
    }
  }
  SUBCASE("width mismatch rejected") {
    CHECK_THROWS_AS(fidelity_pure(zero, StateVector::zero_state(2)), std::invalid_argument);
  }
}

TEST_CASE("Uhlmann fidelity") {
  SUBCASE("identical states give 1") {
    std::mt19937_64 rng(3);
    DensityMatrix rho = testutil::random_density(2, rng);
    CHECK(fidelity_mixed(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("tilted single-qubit pair overlaps at 3/4") {
    CHECK(std::abs(fidelity_mixed(tilted_rho(), tilted_sigma()) - 0.75) < 1e-7);
  }

  SUBCASE("maximally mixed against |0><0| gives 1/2") {
    DensityMatrix mixed(1, Matrix::Identity(2, 2) / 2.0);
    DensityMatrix zero = to_density(StateVector::zero_state(1));
    CHECK(fidelity_mixed(mixed, zero) == doctest::Approx(0.5).epsilon(1e-10));
  }

  SUBCASE("matches closed form for commuting operators") {
    // For simultaneously diagonal states, F = (sum_i sqrt(p_i q_i))^2.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      int n = 1 + static_cast<int>(rng() % 2);
      Eigen::Index dim = Eigen::Index(1) << n;
      Eigen::VectorXd p(dim), q(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        p(i) = uni(rng);
        q(i) = uni(rng);
      }
      p /= p.sum();
      q /= q.sum();
      Matrix u = testutil::random_unitary(dim, rng);
      Matrix rho_m = u * p.cast<Complex>().asDiagonal() * u.adjoint();
      Matrix sig_m = u * q.cast<Complex>().asDiagonal() * u.adjoint();
      double expected = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i) expected += std::sqrt(p(i) * q(i));
      expected *= expected;
      CHECK(fidelity_mixed(DensityMatrix(n, rho_m), DensityMatrix(n, sig_m)) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }

  SUBCASE("symmetric on random pairs") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      int n = 1 + static_cast<int>(rng() % 3);
      DensityMatrix a = testutil::random_density(n, rng);
      DensityMatrix b = testutil::random_density(n, rng);
      double fab = fidelity_mixed(a, b);
      double fba = fidelity_mixed(b, a);
      CHECK(std::abs(fab - fba) < 1e-9);
      CHECK(fab >= -1e-12);
      CHECK(fab <= 1.0 + 1e-9);
    }
  }

  SUBCASE("agrees with fidelity_pure on rank-1 inputs") {
    // The eigensolver square root of a rank-1 projector is only accurate
    // to roughly sqrt(machine epsilon), so the match is checked at 1e-6.
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
      int n = 1 + static_cast<int>(rng() % 2);
      StateVector a = testutil::haar_state(n, rng);
      StateVector b = testutil::haar_state(n, rng);
      CHECK(std::abs(fidelity_mixed(to_density(a), to_density(b)) - fidelity_pure(a, b)) <
            1e-6);
    }
  }
}

TEST_CASE("Helstrom positive projector") {
  SUBCASE("tilted pair yields (I + Y) / 2") {
    HermitianOperator t = helstrom_positive(tilted_sigma(), tilted_rho());
    Matrix expected = (Matrix::Identity(2, 2) + pauli_y()) / 2.0;
    CHECK((t.matrix() - expected).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("identical states yield the zero operator") {
    DensityMatrix s = tilted_sigma();
    HermitianOperator t = helstrom_positive(s, s);
    CHECK(t.matrix().cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("orthogonal basis states yield |0><0|") {
    DensityMatrix zero = to_density(StateVector::zero_state(1));
    DensityMatrix one = to_density(StateVector::basis_state(1, 1));
    HermitianOperator t = helstrom_positive(zero, one);
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = Complex(1, 0);
    CHECK((t.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("result is a projector") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      int n = 1 + static_cast<int>(rng() % 2);
      DensityMatrix a = testutil::random_density(n, rng);
      DensityMatrix b = testutil::random_density(n, rng);
      HermitianOperator t = helstrom_positive(a, b);
      CHECK((t.matrix() * t.matrix() - t.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  SUBCASE("maximizes Tr[T sigma] - Tr[T rho] over a projector grid") {
    // Brute-force check over single-qubit projectors at 0.02 rad resolution
    // plus the trivial operators 0 and I. The acceptance suite repeats this
    // at the full 0.01 rad resolution.
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 5; ++trial) {
      DensityMatrix sigma = testutil::random_density(1, rng);
      DensityMatrix rho = testutil::random_density(1, rng);
      HermitianOperator t = helstrom_positive(sigma, rho);
      double analytic = expectation(sigma, t) - expectation(rho, t);
      double best_grid = 0.0;  // T = 0 and T = I both give 0
      for (double theta = 0.0; theta <= kPi; theta += 0.02) {
        for (double phi = 0.0; phi < 2 * kPi; phi += 0.02) {
          Vector v(2);
          v << Complex(std::cos(theta / 2), 0),
              std::exp(Complex(0, phi)) * std::sin(theta / 2);
          Matrix proj = v * v.adjoint();
          double val = ((sigma.matrix() - rho.matrix()) * proj).trace().real();
          best_grid = std::max(best_grid, val);
        }
      }
      CHECK(analytic >= best_grid - 1e-3);
      CHECK(best_grid >= analytic - 5e-3);  // grid resolution slack
    }
  }
}

TEST_CASE("Bloch vector to density matrix") {
  DensityMatrix center = bloch_to_density(0.0, 0.0, 0.0);
  CHECK((center.matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);

  DensityMatrix up = bloch_to_density(0.0, 0.0, 1.0);
  CHECK(up.matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(up.matrix()(1, 1).real() == doctest::Approx(0.0));

  CHECK_THROWS_AS(bloch_to_density(0.8, 0.8, 0.0), std::invalid_argument);
}

TEST_CASE("partial trace") {
  SUBCASE("factorizes product states") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      StateVector a = testutil::haar_state(1, rng);
      StateVector b = testutil::haar_state(2, rng);
      Vector joint = kron(a.amplitudes(), b.amplitudes());
      DensityMatrix rho(3, joint * joint.adjoint());
      DensityMatrix back_a = partial_trace(rho, {0});
      DensityMatrix back_b = partial_trace(rho, {1, 2});
      CHECK((back_a.matrix() - to_density(a).matrix()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((back_b.matrix() - to_density(b).matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SUBCASE("either side of a Bell pair is maximally mixed") {
    Vector bell(4);
    bell << Complex(1 / std::sqrt(2.0), 0), Complex(0, 0), Complex(0, 0),
        Complex(1 / std::sqrt(2.0), 0);
    DensityMatrix rho(2, bell * bell.adjoint());
    for (int q : {0, 1}) {
      DensityMatrix red = partial_trace(rho, {q});
      CHECK((red.matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("keeping every qubit is the identity operation") {
    std::mt19937_64 rng(43);
    DensityMatrix rho = testutil::random_density(2, rng);
    DensityMatrix same = partial_trace(rho, {0, 1});
    CHECK((same.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("keep set validation") {
    std::mt19937_64 rng(47);
    DensityMatrix rho = testutil::random_density(2, rng);
    CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {2}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {0, 0}), std::invalid_argument);
  }

  SUBCASE("preserves trace and positivity on random states") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
      DensityMatrix rho = testutil::random_density(3, rng);
      DensityMatrix red = partial_trace(rho, {0, 2});
      CHECK(red.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("expectation values") {
  SUBCASE("maximally mixed state has zero Z expectation") {
    DensityMatrix mixed(1, Matrix::Identity(2, 2) / 2.0);
    HermitianOperator z(1, pauli_z());
    CHECK(expectation(mixed, z) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("tilted rho against (I + Y) / 2 gives 1/4") {
    HermitianOperator t(1, (Matrix::Identity(2, 2) + pauli_y()) / 2.0);
    CHECK(expectation(tilted_rho(), t) == doctest::Approx(0.25).epsilon(1e-10));
  }

  SUBCASE("agrees with eigen-decomposition oracle on random pairs") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 20; ++trial) {
      int n = 1 + static_cast<int>(rng() % 2);
      DensityMatrix rho = testutil::random_density(n, rng);
      Matrix h = testutil::random_unitary(rho.dim(), rng);
      Matrix herm = (h + h.adjoint()) / 2.0;
      HermitianOperator obs(n, herm);
      Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
      double expected = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        Vector v = es.eigenvectors().col(i);
        expected += es.eigenvalues()(i) * (v.adjoint() * rho.matrix() * v)(0, 0).real();
      }
      CHECK(expectation(rho, obs) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("scalar template instantiates for float on exact inputs") {
  BasicStateVector<float> z = BasicStateVector<float>::zero_state(1);
  BasicStateVector<float> o = BasicStateVector<float>::basis_state(1, 1);
  CHECK(fidelity_pure(z, o) == doctest::Approx(0.0f));
  CHECK(fidelity_pure(z, z) == doctest::Approx(1.0f));
}
