#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "qtomo/fock.hpp"

using namespace qtomo;

namespace {

// Independent matrix exponential: scaling and squaring with a plain Taylor
// series. Slow but obviously correct; baseline for the eigendecomposition
// route used by displacement().
Matrix taylor_expm(const Matrix& g) {
  const double nrm = g.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  double scale = 1.0;
  while (nrm * scale > 0.5) {
    scale *= 0.5;
    ++s;
  }
  const Matrix x = g * scale;
  Matrix acc = Matrix::Identity(g.rows(), g.cols());
  Matrix term = acc;
  for (int k = 1; k <= 30; ++k) {
    term = (term * x / double(k)).eval();
    acc += term;
  }
  for (int k = 0; k < s; ++k) acc = (acc * acc).eval();
  return acc;
}

Matrix pauli(PauliBasis b) {
  Matrix m(2, 2);
  switch (b) {
    case PauliBasis::x:
      m << 0, 1, 1, 0;
      break;
    case PauliBasis::y:
      m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      break;
    case PauliBasis::z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

}  // namespace

TEST_CASE("annihilation ladder entries") {
  const Matrix a = annihilation(5);
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 5; ++n) {
      const Complex want =
          (m + 1 == n) ? Complex(std::sqrt(double(n)), 0) : Complex(0, 0);
      CHECK(std::abs(a(m, n) - want) == 0.0);
    }
}

TEST_CASE("fock and coherent state vectors") {
  const FockVector one = fock_state(1, 4);
  CHECK(one.amps(1) == Complex(1, 0));
  CHECK(one.norm() == doctest::Approx(1.0));

  const Complex alpha(0.8, -0.5);
  const FockVector c = coherent(alpha, 40);
  CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // amplitude ratio is alpha/sqrt(n+1) regardless of normalization
  for (int n = 0; n + 1 < 6; ++n)
    CHECK(std::abs(c.amps(n + 1) / c.amps(n) - alpha / std::sqrt(n + 1.0)) <
          1e-12);

  const Vector raw = coherent_amplitudes(alpha, 8);
  const double g = std::exp(-0.5 * std::norm(alpha));
  double fact = 1.0;
  Complex pw(1, 0);
  for (int n = 0; n < 8; ++n) {
    CHECK(std::abs(raw(n) - g * pw / std::sqrt(fact)) < 1e-14);
    pw *= alpha;
    fact *= n + 1.0;
  }
}

TEST_CASE("density matrix validation and projection") {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = Complex(0.3, 0);  // not hermitian
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(DensityMatrix{bad}, std::invalid_argument);

  Matrix skew(2, 2);
  skew << 0.6, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.5;  // trace 1.1
  const DensityMatrix fixed = DensityMatrix::project(skew);
  CHECK(fixed.mat().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((fixed.mat() - fixed.mat().adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("displacement agrees with a Taylor exponential") {
  const Complex alpha(0.7, 0.3);
  const int d = 12;
  Matrix gen = alpha * annihilation(d).adjoint() -
               std::conj(alpha) * annihilation(d);
  const Matrix want = taylor_expm(gen);
  const Matrix got = displacement(alpha, d);
  CHECK((want - got).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix unit = got.adjoint() * got;
  CHECK((unit - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("displacement of vacuum reproduces coherent amplitudes") {
  const Complex alpha(1.1, -0.4);
  const int d = 40;
  const Matrix dm = displacement(alpha, d);
  const Vector want = coherent_amplitudes(alpha, d);
  for (int n = 0; n < 12; ++n) CHECK(std::abs(dm(n, 0) - want(n)) < 1e-10);
}

TEST_CASE("thermal state populations") {
  const double n0 = 0.8;
  const DensityMatrix rho = thermal(n0, 60);
  CHECK(rho.mat().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean_photon(rho) == doctest::Approx(n0).epsilon(1e-10));
  const double ratio = n0 / (1.0 + n0);
  for (int n = 0; n < 5; ++n)
    CHECK(rho(n + 1, n + 1).real() / rho(n, n).real() ==
          doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("normally ordered moments") {
  const DensityMatrix two = DensityMatrix::pure(fock_state(2, 3));
  CHECK(normally_ordered_moment(two, 1, 1).real() == doctest::Approx(2.0));
  CHECK(normally_ordered_moment(two, 2, 2).real() == doctest::Approx(2.0));
  CHECK(std::abs(normally_ordered_moment(two, 0, 1)) < 1e-15);
  // high orders stay exact in a tight truncation: a^3 annihilates |2>
  CHECK(std::abs(normally_ordered_moment(two, 3, 3)) == 0.0);
  CHECK(std::abs(normally_ordered_moment(two, 6, 6)) == 0.0);

  const Complex alpha(1.3, 0.2);
  const DensityMatrix coh = DensityMatrix::pure(coherent(alpha, 40));
  for (int n = 0; n <= 3; ++n)
    for (int m = 0; m <= 3; ++m) {
      const Complex want = std::pow(std::conj(alpha), n) * std::pow(alpha, m);
      CHECK(std::abs(normally_ordered_moment(coh, n, m) - want) < 1e-8);
    }
}

TEST_CASE("anti normal moments and the truncation guard") {
  const DensityMatrix one = DensityMatrix::pure(fock_state(1, 4));
  CHECK(anti_normal_moment(one, 1, 1).real() == doctest::Approx(2.0));
  CHECK(anti_normal_moment(one, 0, 0).real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(anti_normal_moment(one, 2, 2), std::out_of_range);
}

TEST_CASE("fidelity and trace distance") {
  const FockVector zero = fock_state(0, 2), one = fock_state(1, 2);
  const DensityMatrix rho0 = DensityMatrix::pure(zero);
  const DensityMatrix rho1 = DensityMatrix::pure(one);
  CHECK(fidelity(rho0, zero) == doctest::Approx(1.0));
  CHECK(fidelity(rho0, one) == doctest::Approx(0.0));
  CHECK(trace_distance(rho0, rho1) == doctest::Approx(1.0));
  CHECK(trace_distance(rho0, rho0) == doctest::Approx(0.0));

  Matrix half = Matrix::Zero(2, 2);
  half(0, 0) = half(1, 1) = 0.5;
  CHECK(trace_distance(rho0, DensityMatrix(half)) == doctest::Approx(0.5));
}

TEST_CASE("kron ordering") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 5, 6, 7;
  const Matrix k = kron(a, b);
  REQUIRE(k.rows() == 4);
  CHECK(k(0, 1) == Complex(5, 0));   // a00 * b01
  CHECK(k(3, 0) == Complex(18, 0));  // a10 * b10
  CHECK(k(3, 3) == Complex(28, 0));  // a11 * b11
}

TEST_CASE("bell joint state blocks and pauli moments") {
  const int fd = 3;
  const JointDensityMatrix bell = bell_joint_state(fd);
  CHECK(bell.mat.trace().real() == doctest::Approx(1.0));
  CHECK(joint_fidelity(bell, bell_joint_vector(fd)) == doctest::Approx(1.0));

  // oracle: dense trace against kron(sigma, (a†)^n a^m), qubit first
  const Matrix a = annihilation(fd);
  for (PauliBasis b : {PauliBasis::x, PauliBasis::y, PauliBasis::z})
    for (int n = 0; n <= 2; ++n)
      for (int m = 0; m <= 2; ++m) {
        Matrix op = Matrix::Identity(fd, fd);
        for (int k = 0; k < n; ++k) op = (a.adjoint() * op).eval();
        for (int k = 0; k < m; ++k) op = (op * a).eval();
        const Complex want = (kron(pauli(b), op) * bell.mat).trace();
        const Complex got = joint_pauli_moment(bell, b, n, m);
        CHECK(std::abs(got - want) < 1e-12);
      }

  CHECK(joint_pauli_moment(bell, PauliBasis::z, 1, 1).real() ==
        doctest::Approx(-0.5));
  CHECK(joint_pauli_moment(bell, PauliBasis::x, 0, 1).real() ==
        doctest::Approx(0.5));
  CHECK(std::abs(joint_pauli_moment(bell, PauliBasis::x, 0, 1).imag()) <
        1e-14);

  const DensityMatrix marg = field_marginal(bell);
  CHECK(marg(0, 0).real() == doctest::Approx(0.5));
  CHECK(marg(1, 1).real() == doctest::Approx(0.5));
  CHECK(std::abs(marg(0, 1)) < 1e-15);
}

TEST_CASE("conditioned field blocks match the qubit projection") {
  const int fd = 3;
  const JointDensityMatrix bell = bell_joint_state(fd);
  for (PauliBasis b : {PauliBasis::x, PauliBasis::y, PauliBasis::z})
    for (int s = 0; s < 2; ++s) {
      const Eigen::Vector2cd q = qubit_basis_state(b, s);
      Matrix want = Matrix::Zero(fd, fd);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          want += std::conj(q(i)) * q(j) *
                  bell.mat.block(i * fd, j * fd, fd, fd);
      const Matrix got = conditioned_field_block(bell, b, s);
      CHECK((want - got).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(got.trace().real() == doctest::Approx(0.5));  // bell is unbiased
    }
}
