#include "qtomo/twochannel.hpp"

#include <cmath>
#include <stdexcept>

#include "qtomo/rng.hpp"
#include "qtomo/simulate.hpp"

namespace qtomo {

namespace {

using LComplex = std::complex<long double>;

}  // namespace

void NoisePair::validate() const {
  if (n1 < 0.0 || n2 < 0.0)
    throw std::invalid_argument("amplifier photon numbers must be >= 0");
}

TwoChannelRecord sample_two_channel(const DensityMatrix& rho,
                                    const NoisePair& noise, size_t n,
                                    uint64_t seed) {
  noise.validate();
  TwoChannelRecord rec;
  rec.noise = noise;
  rec.seed = seed;
  rec.s1.resize(n);
  rec.s2.resize(n);
  const std::vector<Complex> alpha = sample_q(rho, n, derive_seed(seed, 0x2C1));
  const double var_gamma = 0.5 * (-1.0 - noise.s());
  const double var_delta = 2.0 * noise.n_tot();
  const double w1 = noise.w1(), w2 = noise.w2();
  Rng rng(derive_seed(seed, 0x2C2));
  for (size_t i = 0; i < n; ++i) {
    const Complex sbar = alpha[i] + std::conj(rng.complex_gaussian(var_gamma));
    const Complex delta = rng.complex_gaussian(var_delta);
    rec.s1[i] = sbar + w2 * delta;
    rec.s2[i] = sbar - w1 * delta;
  }
  return rec;
}

MomentTable cross_moments(const TwoChannelRecord& record, int max_order) {
  if (record.count() == 0)
    throw std::invalid_argument("cannot take moments of an empty record");
  if (max_order < 1 || max_order > 12)
    throw std::invalid_argument("max_order must be in [1, 12]");
  const int M = max_order;
  const size_t n_samp = record.count();
  std::vector<LComplex> sum((M + 1) * (M + 1), LComplex(0, 0));
  std::vector<long double> sum_sq((M + 1) * (M + 1), 0.0L);
  std::vector<Complex> p1(M + 1), p2(M + 1);
  for (size_t k = 0; k < n_samp; ++k) {
    p1[0] = p2[0] = Complex(1, 0);
    for (int i = 1; i <= M; ++i) {
      p1[i] = p1[i - 1] * std::conj(record.s1[k]);
      p2[i] = p2[i - 1] * record.s2[k];
    }
    for (int n = 0; n <= M; ++n) {
      for (int m = 0; n + m <= M; ++m) {
        const Complex v = p1[n] * p2[m];
        sum[n * (M + 1) + m] += LComplex(v.real(), v.imag());
        sum_sq[n * (M + 1) + m] += std::norm(v);
      }
    }
  }
  MomentTable out(M, Ordering::normal_a);
  const double count = static_cast<double>(n_samp);
  for (int n = 0; n <= M; ++n) {
    for (int m = 0; n + m <= M; ++m) {
      if (n == 0 && m == 0) continue;
      const LComplex s = sum[n * (M + 1) + m];
      const Complex mean(static_cast<double>(s.real() / count),
                         static_cast<double>(s.imag() / count));
      const double var = std::max(
          static_cast<double>(sum_sq[n * (M + 1) + m] / count) -
              std::norm(mean),
          0.0);
      out.set(n, m, mean, std::sqrt(var / count));
    }
  }
  return out;
}

double positive_p_density(const DensityMatrix& rho, const NoisePair& noise,
                          Complex s1, Complex s2) {
  noise.validate();
  const double nt = noise.n_tot();
  const Complex sbar = noise.w1() * s1 + noise.w2() * s2;
  const double gauss =
      std::exp(-std::norm(s1 - s2) / (2.0 * nt)) / (2.0 * M_PI * nt);
  return gauss * qpd_point(rho, sbar, noise.s());
}

PointEstimate q_from_positive_p_point(const TwoChannelRecord& record,
                                      Complex alpha) {
  if (record.count() == 0)
    throw std::invalid_argument("empty record");
  LComplex acc(0, 0);
  long double acc_sq = 0.0L;
  const double a2 = std::norm(alpha);
  for (size_t k = 0; k < record.count(); ++k) {
    const Complex s1 = record.s1[k];
    const Complex s2c = std::conj(record.s2[k]);
    const Complex kern =
        std::exp(-a2 + std::conj(alpha) * s1 + s2c * alpha - s2c * s1) / M_PI;
    acc += LComplex(kern.real(), kern.imag());
    acc_sq += kern.real() * kern.real();
  }
  const double n = static_cast<double>(record.count());
  PointEstimate est;
  est.value = static_cast<double>(acc.real() / n);
  est.imag_part = static_cast<double>(acc.imag() / n);
  const double var =
      std::max(static_cast<double>(acc_sq / n) - est.value * est.value, 0.0);
  est.sigma = std::sqrt(var / n);
  est.reliable = est.sigma <= std::abs(est.value);
  return est;
}

QEstimate positive_p_to_q(const TwoChannelRecord& record,
                          const GridSpec& spec) {
  spec.validate();
  QEstimate out;
  out.q = PhaseGrid::zeros(spec);
  out.sigma = PhaseGrid::zeros(spec);
  out.imag_part = PhaseGrid::zeros(spec);
  out.reliable.assign(static_cast<size_t>(spec.size()), 0);
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      const PointEstimate est =
          q_from_positive_p_point(record, spec.center(ix, iy));
      const size_t i = spec.index(ix, iy);
      out.q.values[i] = est.value;
      out.sigma.values[i] = est.sigma;
      out.imag_part.values[i] = est.imag_part;
      out.reliable[i] = est.reliable ? 1 : 0;
    }
  }
  return out;
}

DensityMatrix density_from_positive_p(const TwoChannelRecord& record,
                                      int dim) {
  if (record.count() == 0) throw std::invalid_argument("empty record");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  std::vector<LComplex> acc(static_cast<size_t>(dim) * dim, LComplex(0, 0));
  std::vector<double> inv_sqrt_fact(dim);
  for (int n = 0; n < dim; ++n)
    inv_sqrt_fact[n] = 1.0 / std::sqrt(std::tgamma(n + 1.0));
  std::vector<Complex> r(dim), c(dim);
  // |S1><S2| / <S2|S1> entrywise: S1^m conj(S2)^n e^{-conj(S2) S1} / sqrt(m!n!)
  for (size_t k = 0; k < record.count(); ++k) {
    const Complex s1 = record.s1[k];
    const Complex s2c = std::conj(record.s2[k]);
    const Complex base = std::exp(-s2c * s1);
    Complex pr(1, 0), pc(1, 0);
    for (int m = 0; m < dim; ++m) {
      r[m] = pr * inv_sqrt_fact[m];
      pr *= s1;
    }
    for (int n = 0; n < dim; ++n) {
      c[n] = pc * inv_sqrt_fact[n];
      pc *= s2c;
    }
    for (int m = 0; m < dim; ++m) {
      const Complex rm = r[m] * base;
      for (int n = 0; n < dim; ++n) {
        const Complex v = rm * c[n];
        acc[static_cast<size_t>(m) * dim + n] += LComplex(v.real(), v.imag());
      }
    }
  }
  Matrix rho(dim, dim);
  const long double n_samp = static_cast<long double>(record.count());
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      const LComplex v = acc[static_cast<size_t>(m) * dim + n] / n_samp;
      rho(m, n) = Complex(static_cast<double>(v.real()),
                          static_cast<double>(v.imag()));
    }
  return DensityMatrix::project(rho);
}

}  // namespace qtomo
