#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "qtomo/phasespace.hpp"

using namespace qtomo;

namespace {

// Independent route to the s-parametrized distribution: embed the state in a
// large space, displace with the eigendecomposition-based unitary, and sum
// the generalized parity series with explicit weights.
double qpd_oracle(const DensityMatrix& rho, Complex alpha, double s, int big) {
  Matrix r = Matrix::Zero(big, big);
  r.topLeftCorner(rho.dim(), rho.dim()) = rho.mat();
  const Matrix d = displacement(alpha, big);
  const Matrix t = d.adjoint() * r * d;
  const double kappa = (s + 1.0) / (s - 1.0);
  long double acc = 0.0L, w = 1.0L;
  for (int n = 0; n < big; ++n) {
    acc += w * t(n, n).real();
    w *= kappa;
  }
  return static_cast<double>(2.0L / (M_PI * (1.0L - (long double)s)) * acc);
}

}  // namespace

TEST_CASE("grid spec geometry") {
  GridSpec g{-2.0, 2.0, -1.0, 1.0, 4, 2};
  g.validate();
  CHECK(g.dx() == doctest::Approx(1.0));
  CHECK(g.dy() == doctest::Approx(1.0));
  CHECK(g.center(0, 0) == Complex(-1.5, -0.5));
  CHECK(g.center(3, 1) == Complex(1.5, 0.5));
  CHECK(g.index(3, 1) == 7);
  CHECK(g.size() == 8);

  CHECK_THROWS_AS(GridSpec{}.validate(), std::invalid_argument);
  GridSpec inverted{1.0, -1.0, -1.0, 1.0, 4, 4};
  CHECK_THROWS_AS(inverted.validate(), std::invalid_argument);

  const GridSpec sq = GridSpec::square(3.0, 6);
  CHECK(sq.x_min == -3.0);
  CHECK(sq.ny == 6);
  const GridSpec cen = GridSpec::centered(Complex(1.0, -2.0), 0.5, 2);
  CHECK(cen.x_min == doctest::Approx(0.5));
  CHECK(cen.y_max == doctest::Approx(-1.5));
}

TEST_CASE("husimi q of vacuum and coherent states is the exact gaussian") {
  const DensityMatrix vac = DensityMatrix::pure(fock_state(0, 1));
  const GridSpec g = GridSpec::square(4.0, 21);
  const PhaseGrid q = husimi_q(vac, g);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double want = std::exp(-std::norm(g.center(ix, iy))) / M_PI;
      CHECK(std::abs(q.at(ix, iy) - want) < 1e-14);
    }

  const Complex beta(1.2, -0.7);
  const DensityMatrix coh = DensityMatrix::pure(coherent(beta, 36));
  for (Complex a : {Complex(0, 0), Complex(1.5, 0.5), beta}) {
    const double want = std::exp(-std::norm(a - beta)) / M_PI;
    CHECK(qpd_point(coh, a, -1.0) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("wigner closed forms for fock states") {
  // W_n(alpha) = (2/pi) (-1)^n e^{-2|alpha|^2} L_n(4 |alpha|^2)
  for (int n = 0; n <= 3; ++n) {
    const DensityMatrix rho = DensityMatrix::pure(fock_state(n, n + 1));
    for (double r : {0.0, 0.35, 0.8, 1.6}) {
      const Complex a(r * 0.6, -r * 0.8);
      const double x = 4.0 * std::norm(a);
      const double want = 2.0 / M_PI * (n % 2 ? -1.0 : 1.0) *
                          std::exp(-2.0 * std::norm(a)) *
                          std::laguerre(unsigned(n), x);
      CHECK(qpd_point(rho, a, 0.0) == doctest::Approx(want).epsilon(1e-10));
    }
  }
  const DensityMatrix one = DensityMatrix::pure(fock_state(1, 2));
  CHECK(qpd_point(one, Complex(0, 0), 0.0) ==
        doctest::Approx(-2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("qpd matches the displaced parity oracle") {
  Matrix m(3, 3);
  m << 0.5, Complex(0.2, 0.1), 0.0, Complex(0.2, -0.1), 0.3,
      Complex(-0.05, 0.02), 0.0, Complex(-0.05, -0.02), 0.2;
  const DensityMatrix rho = DensityMatrix::project(m);
  for (double s : {0.0, -0.4, -1.0, -2.2}) {
    for (Complex a : {Complex(0.3, 0.3), Complex(-1.1, 0.6), Complex(2.0, 0)}) {
      const double want = qpd_oracle(rho, a, s, 50);
      CHECK(qpd_point(rho, a, s) == doctest::Approx(want).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(qpd_point(rho, Complex(0, 0), 0.1), std::invalid_argument);
}

TEST_CASE("detector distribution of a coherent state is a shifted gaussian") {
  // s = -1-2N0 corresponds to a detector adding N0 thermal photons: the
  // distribution of a coherent signal is a gaussian of variance 1+N0.
  const Complex beta(0.9, -0.4);
  const DensityMatrix rho = DensityMatrix::pure(coherent(beta, 30));
  const double n0 = 0.7;
  const double v = 1.0 + n0;
  for (Complex a : {Complex(0, 0), Complex(1.4, 0.2), Complex(-0.5, -1.0)}) {
    const double want = std::exp(-std::norm(a - beta) / v) / (M_PI * v);
    CHECK(qpd_point(rho, a, -1.0 - 2.0 * n0) ==
          doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("thermal state distributions are gaussians at every s") {
  const double nbar = 0.7;
  const DensityMatrix rho = thermal(nbar, 50);
  for (double s : {0.0, -1.0, -3.0}) {
    const double v = nbar + (1.0 - s) / 2.0;
    for (double r : {0.0, 0.9, 1.7}) {
      const Complex a(r, -0.3 * r);
      const double want = std::exp(-std::norm(a) / v) / (M_PI * v);
      CHECK(qpd_point(rho, a, s) == doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("wigner grid of vacuum integrates to one") {
  const DensityMatrix vac = DensityMatrix::pure(fock_state(0, 1));
  const PhaseGrid w = wigner(vac, GridSpec::square(4.5, 61));
  CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gaussian convolution steps wigner down to husimi") {
  const Complex beta(0.6, 0.4);
  const DensityMatrix rho = DensityMatrix::pure(coherent(beta, 25));
  const GridSpec g = GridSpec::square(5.0, 101);
  const PhaseGrid w = wigner(rho, g);
  const PhaseGrid q = gaussian_convolve(w, 0.0, -1.0);
  const PhaseGrid q_direct = husimi_q(rho, g);
  double worst = 0.0;
  for (int iy = 20; iy < g.ny - 20; ++iy)
    for (int ix = 20; ix < g.nx - 20; ++ix)
      worst = std::max(worst, std::abs(q.at(ix, iy) - q_direct.at(ix, iy)));
  CHECK(worst < 2e-4);  // midpoint quadrature at h = 0.099
  CHECK_THROWS_AS(gaussian_convolve(w, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("detection efficiency") {
  CHECK(detection_efficiency(0.0) == doctest::Approx(1.0));
  CHECK(detection_efficiency(4.4) == doctest::Approx(1.0 / 5.4));
}
