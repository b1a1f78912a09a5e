#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qtomo/moments.hpp"

using namespace qtomo;

namespace {

double table_diff(const MomentTable& a, const MomentTable& b) {
  double worst = 0.0;
  for (int n = 0; n <= a.max_order(); ++n)
    for (int m = 0; n + m <= a.max_order(); ++m)
      worst = std::max(worst, std::abs(a.value(n, m) - b.value(n, m)));
  return worst;
}

// worst |got - want| / max(1, |want|); high-order entries grow like
// order!, so an absolute bound would be dominated by their storage rounding
double table_diff_scaled(const MomentTable& got, const MomentTable& want) {
  double worst = 0.0;
  for (int n = 0; n <= got.max_order(); ++n)
    for (int m = 0; n + m <= got.max_order(); ++m)
      worst = std::max(worst, std::abs(got.value(n, m) - want.value(n, m)) /
                                  std::max(1.0, std::abs(want.value(n, m))));
  return worst;
}

}  // namespace

TEST_CASE("table layout and the fixed corner entry") {
  MomentTable t(4, Ordering::normal_a);
  CHECK(t.value(0, 0) == Complex(1, 0));
  CHECK(t.sigma(0, 0) == 0.0);
  CHECK(t.has(2, 2));
  CHECK(!t.has(3, 2));
  CHECK(!t.has(-1, 0));
  t.set(1, 2, Complex(0.5, -0.25), 0.1);
  CHECK(t.value(1, 2) == Complex(0.5, -0.25));
  CHECK(t.sigma(1, 2) == 0.1);
  CHECK_THROWS_AS(t.set(5, 0, Complex(0, 0), 0.0), std::out_of_range);
  CHECK_THROWS_AS(MomentTable(13, Ordering::normal_a), std::invalid_argument);

  // the corner can be overwritten: pauli-weighted tables store <sigma> there
  t.set(0, 0, Complex(0.25, 0), 0.01);
  CHECK(t.value(0, 0) == Complex(0.25, 0));
}

TEST_CASE("hermiticity defect") {
  MomentTable t(2, Ordering::normal_a);
  t.set(0, 1, Complex(0.3, 0.2), 0);
  t.set(1, 0, Complex(0.3, -0.2), 0);
  t.set(1, 1, Complex(1.0, 0.0), 0);
  CHECK(t.hermiticity_defect() < 1e-15);
  t.set(1, 0, Complex(0.3, -0.1), 0);
  CHECK(t.hermiticity_defect() == doctest::Approx(0.1));
}

TEST_CASE("empirical moments of a tiny hand record") {
  const std::vector<Complex> z = {{1, 1}, {2, 0}, {0, -1}};
  const MomentTable t = empirical_s_moments(z, 2);
  // <(S†)^0 S^1> = mean z
  CHECK(t.value(0, 1) == Complex(1.0, 0.0));
  // <(S†)^1 S^1> = mean |z|^2 = (2 + 4 + 1)/3
  CHECK(t.value(1, 1).real() == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  // <S^2> = mean z^2 = ((2i) + 4 + (-1))/3 = 1 + 2i/3
  CHECK(std::abs(t.value(0, 2) - Complex(1.0, 2.0 / 3.0)) < 1e-14);
  // stderr of (1,1): population variance of |z|^2 over n, then /sqrt(n)
  const double mu = 7.0 / 3.0;
  const double var =
      ((2 - mu) * (2 - mu) + (4 - mu) * (4 - mu) + (1 - mu) * (1 - mu)) / 3.0;
  CHECK(t.sigma(1, 1) == doctest::Approx(std::sqrt(var / 3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(empirical_s_moments(std::vector<Complex>{}, 2),
                  std::invalid_argument);
}

TEST_CASE("analytic noise tables") {
  const double n0 = 1.7;
  const MomentTable t = thermal_noise_table(n0, 6);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; p + q <= 6 && q <= 3; ++q) {
      double want = 0.0;
      if (p == q) {
        want = 1.0;
        for (int k = 1; k <= p; ++k) want *= k * (n0 + 1.0);
      }
      CHECK(std::abs(t.value(p, q) - Complex(want, 0)) < 1e-12);
    }

  // displaced table at beta = 0 reduces to the undisplaced one
  const MomentTable d0 = displaced_thermal_noise_table(Complex(0, 0), n0, 6);
  CHECK(table_diff(d0, t) < 1e-12);

  // displaced table against brute-force binomial expansion of <(b+g)^p...>
  const Complex beta(0.6, -0.9);
  const MomentTable d = displaced_thermal_noise_table(beta, n0, 5);
  for (int p = 0; p <= 5; ++p)
    for (int q = 0; p + q <= 5; ++q) {
      Complex want(0, 0);
      for (int k = 0; k <= std::min(p, q); ++k) {
        double c = 1.0;  // C(p,k) C(q,k) k! (n0+1)^k
        for (int i = 0; i < k; ++i)
          c *= double(p - i) * double(q - i) / double(i + 1) * (n0 + 1.0);
        want += c * std::pow(beta, p - k) * std::pow(std::conj(beta), q - k);
      }
      CHECK(std::abs(d.value(p, q) - want) < 1e-10);
    }
}

TEST_CASE("coherent table and exact state tables") {
  const Complex alpha(1.1, 0.4);
  const MomentTable t = coherent_moment_table(alpha, 6);
  CHECK(std::abs(t.value(2, 3) - std::pow(std::conj(alpha), 2) *
                                     std::pow(alpha, 3)) < 1e-12);

  const DensityMatrix rho = DensityMatrix::pure(coherent(alpha, 45));
  const MomentTable exact = moment_table_from_density(rho, 6);
  CHECK(table_diff(exact, t) < 1e-7);  // truncated state vs ideal
}

TEST_CASE("convolution matches the displaced gaussian closed form") {
  // S = alpha + h† with thermal h has the moments of a complex gaussian with
  // mean conj(alpha) when read in the (S†, S) = (h+conj(alpha), h†+alpha)
  // convention, so the S table equals the displaced thermal table at
  // beta = conj(alpha). Two fully independent code paths.
  const Complex alpha(1.3, -0.5);
  const double n0 = 2.0;
  const MomentTable s = convolve_with_noise(coherent_moment_table(alpha, 8),
                                            thermal_noise_table(n0, 8));
  const MomentTable direct =
      displaced_thermal_noise_table(std::conj(alpha), n0, 8);
  CHECK(table_diff(s, direct) < 1e-9);
}

TEST_CASE("deconvolution inverts the noise convolution exactly") {
  const Complex alpha(1.3, 0.0);
  const double n0 = 2.0;
  const MomentTable a = coherent_moment_table(alpha, 8);
  const MomentTable h = thermal_noise_table(n0, 8);
  const MomentTable s = convolve_with_noise(a, h);
  const MomentTable back = deconvolve(s, h);
  CHECK(table_diff_scaled(back, a) < 1e-12);

  // round trip in the other direction
  const MomentTable s2 = convolve_with_noise(back, h);
  CHECK(table_diff_scaled(s2, s) < 1e-10);

  // a non-gaussian signal against a displaced reference
  const DensityMatrix one = DensityMatrix::pure(fock_state(1, 2));
  const MomentTable a1 = moment_table_from_density(one, 6);
  const MomentTable hd = displaced_thermal_noise_table(Complex(0.3, 0.2), 0.8, 6);
  CHECK(table_diff_scaled(deconvolve(convolve_with_noise(a1, hd), hd), a1) <
        1e-12);
}

TEST_CASE("deconvolution error propagation grows with noise") {
  MomentTable s(4, Ordering::anti_normal_s);
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; n + m <= 4; ++m)
      if (n + m > 0) s.set(n, m, Complex(0, 0), 0.01);
  const MomentTable quiet = deconvolve(s, thermal_noise_table(0.0, 4));
  const MomentTable loud = deconvolve(s, thermal_noise_table(4.0, 4));
  CHECK(loud.sigma(2, 2) > quiet.sigma(2, 2));
  CHECK(quiet.sigma(2, 2) >= 0.01);  // never shrinks below the input error
}

TEST_CASE("moment to density map") {
  // |1>: only (0,0) and (1,1) moments are nonzero
  MomentTable t(8, Ordering::normal_a);
  for (int n = 0; n <= 8; ++n)
    for (int m = 0; n + m <= 8; ++m)
      if (n + m > 0) t.set(n, m, Complex(n == 1 && m == 1 ? 1.0 : 0.0, 0), 0);
  const Matrix rho = moments_to_density(t, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double want = (i == 1 && j == 1) ? 1.0 : 0.0;
      CHECK(std::abs(rho(i, j) - Complex(want, 0)) < 1e-12);
    }
  CHECK_THROWS_AS(moments_to_density(t, 6), std::invalid_argument);

  // random mixed state round trip: exact when the table covers 2(d-1)
  Matrix raw(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      raw(i, j) = Complex(std::sin(3.7 * i + j), std::cos(2.1 * i - j));
  raw = (raw * raw.adjoint()).eval();
  const DensityMatrix mixed = DensityMatrix::project(raw);
  const MomentTable full = moment_table_from_density(mixed, 8);
  const Matrix back = moments_to_density(full, 5);
  CHECK((back - mixed.mat()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("truncation bound flags out of range population") {
  const DensityMatrix two = DensityMatrix::pure(fock_state(2, 3));
  const MomentTable t = moment_table_from_density(two, 8);
  CHECK(truncation_bound(t, 3) < 1e-12);   // nothing above |2>
  CHECK(truncation_bound(t, 2) >= 2.0);    // <(a†)^2 a^2> = 2
}

TEST_CASE("third order cumulants vanish for gaussian statistics") {
  // displaced thermal: every cumulant beyond second order is zero, which
  // only holds if all the subtraction coefficients are right
  const Complex beta(0.7, 0.3);
  const MomentTable g = displaced_thermal_noise_table(beta, 1.3, 6);
  // reinterpret as a normally ordered signal table: same classical moments
  MomentTable t(6, Ordering::normal_a);
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; n + m <= 6; ++m)
      if (n + m > 0) t.set(n, m, g.value(m, n), 0);  // (a†)^n a^m ~ z̄^n z^m
  const ThirdOrderCumulants k = third_order_cumulants(t);
  CHECK(std::abs(k.k30) < 1e-10);
  CHECK(std::abs(k.k21) < 1e-10);
  CHECK(std::abs(k.k12) < 1e-10);
  CHECK(std::abs(k.k03) < 1e-10);

  // (|0> + |3>)/sqrt(2): k30 = <(a†)^3> = sqrt(6)/2, lower moments vanish
  FockVector psi;
  psi.amps = Vector::Zero(4);
  psi.amps(0) = psi.amps(3) = 1.0 / std::sqrt(2.0);
  const MomentTable t3 =
      moment_table_from_density(DensityMatrix::pure(psi), 6);
  const ThirdOrderCumulants k3 = third_order_cumulants(t3);
  CHECK(k3.k30.real() == doctest::Approx(std::sqrt(6.0) / 2.0));
  CHECK(std::abs(k3.k03 - std::conj(k3.k30)) < 1e-12);
}

TEST_CASE("reference relabeling and uniform errors") {
  MomentTable s(3, Ordering::anti_normal_s);
  s.set(1, 1, Complex(2.5, 0), 0.2);
  s.set(0, 1, Complex(0.1, -0.3), 0.05);
  const MomentTable h = noise_moments_from_reference(s);
  CHECK(h.tag() == Ordering::anti_normal_h);
  CHECK(h.value(1, 1) == s.value(1, 1));
  CHECK(h.sigma(0, 1) == s.sigma(0, 1));

  const MomentTable u = with_uniform_sigma(h, 0.5);
  CHECK(u.sigma(1, 1) == 0.5);
  CHECK(u.sigma(0, 0) == 0.0);
  CHECK(u.value(1, 1) == h.value(1, 1));
}

TEST_CASE("empirical moments from a histogram use bin centers") {
  GridSpec g{-2.0, 2.0, -2.0, 2.0, 4, 4};
  Histogram2D h;
  h.spec = g;
  h.counts.assign(16, 0.0);
  h.counts[g.index(2, 2)] = 3.0;  // center (0.5, 0.5)
  h.counts[g.index(0, 1)] = 1.0;  // center (-1.5, -0.5)
  h.total = 4;
  const MomentTable t = empirical_s_moments(h, 2);
  const Complex z1(0.5, 0.5), z2(-1.5, -0.5);
  const Complex want = (3.0 * z1 + z2) / 4.0;
  CHECK(std::abs(t.value(0, 1) - want) < 1e-14);
  const double want11 = (3.0 * std::norm(z1) + std::norm(z2)) / 4.0;
  CHECK(t.value(1, 1).real() == doctest::Approx(want11).epsilon(1e-14));
}
