#include "qtomo/moments.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace qtomo {

namespace {

using LComplex = std::complex<long double>;

constexpr int kMaxSupportedOrder = 12;

// Binomials up to 12 are exact in double.
double binom(int n, int k) {
  static const auto table = [] {
    std::array<std::array<double, kMaxSupportedOrder + 1>,
               kMaxSupportedOrder + 1>
        c{};
    for (int i = 0; i <= kMaxSupportedOrder; ++i) {
      c[i][0] = 1.0;
      for (int j = 1; j <= i; ++j)
        c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0.0);
    }
    return c;
  }();
  return table[n][k];
}

void require_tag(const MomentTable& t, Ordering tag, const char* what) {
  if (t.tag() != tag) throw std::invalid_argument(what);
}

int check_order(int max_order) {
  if (max_order < 1 || max_order > kMaxSupportedOrder)
    throw std::invalid_argument("max_order must be in [1, 12]");
  return max_order;
}

// Shared core for sample- and histogram-based moment estimates. Weights are
// the per-point masses, n_eff the effective count entering the standard
// error.
template <typename PointFn>
MomentTable weighted_s_moments(size_t n_points, double total_weight,
                               double n_eff, int max_order,
                               const PointFn& point) {
  MomentTable out(max_order, Ordering::anti_normal_s);
  const int M = max_order;
  // power grid: pw[n][m] accumulates conj(z)^n z^m
  std::vector<LComplex> sum((M + 1) * (M + 1), LComplex(0, 0));
  std::vector<long double> sum_sq((M + 1) * (M + 1), 0.0L);
  std::vector<Complex> zp(M + 1), zb(M + 1);
  for (size_t k = 0; k < n_points; ++k) {
    auto [z, w] = point(k);
    zp[0] = zb[0] = Complex(1, 0);
    for (int m = 1; m <= M; ++m) zp[m] = zp[m - 1] * z;
    for (int n = 1; n <= M; ++n) zb[n] = zb[n - 1] * std::conj(z);
    for (int n = 0; n <= M; ++n) {
      for (int m = 0; n + m <= M; ++m) {
        const Complex v = zb[n] * zp[m];
        sum[n * (M + 1) + m] += LComplex(w * v.real(), w * v.imag());
        sum_sq[n * (M + 1) + m] += w * std::norm(v);
      }
    }
  }
  for (int n = 0; n <= M; ++n) {
    for (int m = 0; n + m <= M; ++m) {
      if (n == 0 && m == 0) continue;
      const LComplex s = sum[n * (M + 1) + m];
      const Complex mean(static_cast<double>(s.real() / total_weight),
                         static_cast<double>(s.imag() / total_weight));
      const double var = std::max(
          static_cast<double>(sum_sq[n * (M + 1) + m] / total_weight) -
              std::norm(mean),
          0.0);
      out.set(n, m, mean, std::sqrt(var / n_eff));
    }
  }
  return out;
}

}  // namespace

MomentTable::MomentTable(int max_order, Ordering tag)
    : max_order_(check_order(max_order)), tag_(tag) {
  const size_t n = static_cast<size_t>((max_order_ + 1) * (max_order_ + 2) / 2);
  values_.assign(n, Complex(0, 0));
  sigmas_.assign(n, 0.0);
  values_[0] = Complex(1, 0);
}

int MomentTable::idx(int n, int m) const {
  if (!has(n, m)) throw std::out_of_range("moment index outside table");
  return n * (max_order_ + 1) - n * (n - 1) / 2 + m;
}

bool MomentTable::has(int n, int m) const {
  return n >= 0 && m >= 0 && n + m <= max_order_;
}

Complex MomentTable::value(int n, int m) const { return values_[idx(n, m)]; }

double MomentTable::sigma(int n, int m) const { return sigmas_[idx(n, m)]; }

void MomentTable::set(int n, int m, Complex v, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  const int i = idx(n, m);
  values_[i] = v;
  sigmas_[i] = sigma;
}

double MomentTable::hermiticity_defect() const {
  double worst = 0.0;
  for (int n = 0; n <= max_order_; ++n)
    for (int m = 0; n + m <= max_order_; ++m)
      worst = std::max(worst, std::abs(value(n, m) - std::conj(value(m, n))));
  return worst;
}

MomentTable empirical_s_moments(const std::vector<Complex>& samples,
                                int max_order) {
  check_order(max_order);
  if (samples.empty())
    throw std::invalid_argument("cannot take moments of an empty record");
  const double n = static_cast<double>(samples.size());
  return weighted_s_moments(
      samples.size(), n, n, max_order,
      [&](size_t k) { return std::pair<Complex, double>(samples[k], 1.0); });
}

MomentTable empirical_s_moments(const MeasurementRecord& record,
                                int max_order) {
  return empirical_s_moments(record.samples, max_order);
}

MomentTable empirical_s_moments(const Histogram2D& hist, int max_order) {
  check_order(max_order);
  const double w_tot = hist.in_range();
  if (!(w_tot > 0.0))
    throw std::invalid_argument("cannot take moments of an empty histogram");
  const GridSpec& g = hist.spec;
  return weighted_s_moments(hist.counts.size(), w_tot, w_tot, max_order,
                            [&](size_t k) {
                              const int ix = static_cast<int>(k) % g.nx;
                              const int iy = static_cast<int>(k) / g.nx;
                              return std::pair<Complex, double>(
                                  g.center(ix, iy), hist.counts[k]);
                            });
}

MomentTable noise_moments_from_reference(const MomentTable& reference) {
  require_tag(reference, Ordering::anti_normal_s,
              "reference must carry measured-amplitude moments");
  MomentTable out(reference.max_order(), Ordering::anti_normal_h);
  for (int n = 0; n <= reference.max_order(); ++n)
    for (int m = 0; n + m <= reference.max_order(); ++m)
      if (n || m) out.set(n, m, reference.value(n, m), reference.sigma(n, m));
  return out;
}

MomentTable deconvolve(const MomentTable& signal_s,
                       const MomentTable& noise_h) {
  require_tag(signal_s, Ordering::anti_normal_s,
              "deconvolve expects measured-amplitude moments");
  require_tag(noise_h, Ordering::anti_normal_h,
              "deconvolve expects noise-mode moments");
  const int M = signal_s.max_order();
  if (noise_h.max_order() < M)
    throw std::invalid_argument("noise table shorter than signal table");
  MomentTable out(M, Ordering::normal_a);
  // (0,0) passes through: H(0,0) = 1. For ordinary tables this keeps the 1;
  // Pauli-weighted tables carry <sigma> there.
  out.set(0, 0, signal_s.value(0, 0), signal_s.sigma(0, 0));
  // Increasing total order: every subtracted term has strictly lower order,
  // so each entry is solved with unit leading coefficient.
  for (int order = 1; order <= M; ++order) {
    for (int n = 0; n <= order; ++n) {
      const int m = order - n;
      LComplex acc(signal_s.value(n, m).real(), signal_s.value(n, m).imag());
      long double var = signal_s.sigma(n, m) * signal_s.sigma(n, m);
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= m; ++j) {
          if (i == n && j == m) continue;
          const double c = binom(n, i) * binom(m, j);
          const Complex a = out.value(i, j);
          const Complex h = noise_h.value(n - i, m - j);
          acc -= static_cast<long double>(c) * LComplex(a.real(), a.imag()) *
                 LComplex(h.real(), h.imag());
          const double sa = out.sigma(i, j);
          var += c * c *
                 (std::norm(a) * noise_h.sigma(n - i, m - j) *
                      noise_h.sigma(n - i, m - j) +
                  std::norm(h) * sa * sa);
        }
      }
      out.set(n, m,
              Complex(static_cast<double>(acc.real()),
                      static_cast<double>(acc.imag())),
              std::sqrt(static_cast<double>(var)));
    }
  }
  return out;
}

MomentTable convolve_with_noise(const MomentTable& signal_a,
                                const MomentTable& noise_h) {
  require_tag(signal_a, Ordering::normal_a,
              "convolve expects signal-mode moments");
  require_tag(noise_h, Ordering::anti_normal_h,
              "convolve expects noise-mode moments");
  const int M = signal_a.max_order();
  if (noise_h.max_order() < M)
    throw std::invalid_argument("noise table shorter than signal table");
  MomentTable out(M, Ordering::anti_normal_s);
  out.set(0, 0, signal_a.value(0, 0), signal_a.sigma(0, 0));
  for (int n = 0; n <= M; ++n) {
    for (int m = 0; n + m <= M; ++m) {
      if (n == 0 && m == 0) continue;
      LComplex acc(0, 0);
      long double var = 0.0;
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= m; ++j) {
          const double c = binom(n, i) * binom(m, j);
          const Complex a = signal_a.value(i, j);
          const Complex h = noise_h.value(n - i, m - j);
          acc += static_cast<long double>(c) * LComplex(a.real(), a.imag()) *
                 LComplex(h.real(), h.imag());
          var += c * c *
                 (std::norm(a) * noise_h.sigma(n - i, m - j) *
                      noise_h.sigma(n - i, m - j) +
                  std::norm(h) * signal_a.sigma(i, j) * signal_a.sigma(i, j));
        }
      }
      out.set(n, m,
              Complex(static_cast<double>(acc.real()),
                      static_cast<double>(acc.imag())),
              std::sqrt(static_cast<double>(var)));
    }
  }
  return out;
}

Matrix moments_to_density(const MomentTable& normal_a, int dim) {
  require_tag(normal_a, Ordering::normal_a,
              "density map expects signal-mode moments");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  const int M = normal_a.max_order();
  if (2 * (dim - 1) > M)
    throw std::invalid_argument("table order too small for requested dim");
  std::vector<double> inv_sqrt_fact(dim);
  for (int n = 0; n < dim; ++n)
    inv_sqrt_fact[n] = 1.0 / std::sqrt(std::tgamma(n + 1.0));
  Matrix rho(dim, dim);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      LComplex acc(0, 0);
      long double fl = 1.0L;  // (-1)^l / l!
      for (int l = 0; n + l + m + l <= M; ++l) {
        if (l > 0) fl /= -l;
        const Complex a = normal_a.value(n + l, m + l);
        acc += fl * LComplex(a.real(), a.imag());
      }
      rho(m, n) = inv_sqrt_fact[n] * inv_sqrt_fact[m] *
                  Complex(static_cast<double>(acc.real()),
                          static_cast<double>(acc.imag()));
    }
  }
  return rho;
}

double truncation_bound(const MomentTable& normal_a, int n_cut) {
  require_tag(normal_a, Ordering::normal_a,
              "truncation bound expects signal-mode moments");
  if (!normal_a.has(n_cut, n_cut))
    throw std::invalid_argument("table order too small for requested cut");
  return std::abs(normal_a.value(n_cut, n_cut)) +
         3.0 * normal_a.sigma(n_cut, n_cut);
}

ThirdOrderCumulants third_order_cumulants(const MomentTable& normal_a) {
  require_tag(normal_a, Ordering::normal_a,
              "cumulants expect signal-mode moments");
  if (normal_a.max_order() < 3)
    throw std::invalid_argument("third-order cumulants need max_order >= 3");
  const auto v = [&](int n, int m) { return normal_a.value(n, m); };
  const Complex ad = v(1, 0), a = v(0, 1);
  ThirdOrderCumulants k;
  k.k30 = v(3, 0) - 3.0 * v(2, 0) * ad + 2.0 * ad * ad * ad;
  k.k21 = v(2, 1) - v(2, 0) * a - 2.0 * v(1, 1) * ad + 2.0 * ad * ad * a;
  k.k12 = v(1, 2) - v(0, 2) * ad - 2.0 * v(1, 1) * a + 2.0 * a * a * ad;
  k.k03 = v(0, 3) - 3.0 * v(0, 2) * a + 2.0 * a * a * a;
  return k;
}

MomentTable coherent_moment_table(Complex alpha, int max_order) {
  MomentTable out(max_order, Ordering::normal_a);
  for (int n = 0; n <= max_order; ++n)
    for (int m = 0; n + m <= max_order; ++m)
      if (n || m)
        out.set(n, m,
                std::pow(std::conj(alpha), static_cast<double>(n)) *
                    std::pow(alpha, static_cast<double>(m)),
                0.0);
  return out;
}

MomentTable thermal_noise_table(double n0, int max_order) {
  if (n0 < 0.0) throw std::invalid_argument("n0 must be >= 0");
  MomentTable out(max_order, Ordering::anti_normal_h);
  double f = 1.0;
  for (int p = 1; 2 * p <= max_order; ++p) {
    f *= p * (n0 + 1.0);
    out.set(p, p, Complex(f, 0), 0.0);
  }
  return out;
}

MomentTable displaced_thermal_noise_table(Complex beta, double n0,
                                          int max_order) {
  if (n0 < 0.0) throw std::invalid_argument("n0 must be >= 0");
  MomentTable out(max_order, Ordering::anti_normal_h);
  for (int p = 0; p <= max_order; ++p) {
    for (int q = 0; p + q <= max_order; ++q) {
      if (p == 0 && q == 0) continue;
      LComplex acc(0, 0);
      for (int k = 0; k <= std::min(p, q); ++k) {
        double c = binom(p, k) * binom(q, k) * std::tgamma(k + 1.0) *
                   std::pow(n0 + 1.0, k);
        const Complex t = c *
                          std::pow(beta, static_cast<double>(p - k)) *
                          std::pow(std::conj(beta), static_cast<double>(q - k));
        acc += LComplex(t.real(), t.imag());
      }
      out.set(p, q,
              Complex(static_cast<double>(acc.real()),
                      static_cast<double>(acc.imag())),
              0.0);
    }
  }
  return out;
}

MomentTable moment_table_from_density(const DensityMatrix& rho,
                                      int max_order) {
  MomentTable out(max_order, Ordering::normal_a);
  for (int n = 0; n <= max_order; ++n)
    for (int m = 0; n + m <= max_order; ++m)
      if (n || m) out.set(n, m, normally_ordered_moment(rho, n, m), 0.0);
  return out;
}

MomentTable with_uniform_sigma(MomentTable table, double sigma) {
  for (int n = 0; n <= table.max_order(); ++n)
    for (int m = 0; n + m <= table.max_order(); ++m)
      if (n || m) table.set(n, m, table.value(n, m), sigma);
  return table;
}

}  // namespace qtomo
