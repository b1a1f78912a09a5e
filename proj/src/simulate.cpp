#include "qtomo/simulate.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qtomo/rng.hpp"

namespace qtomo {

namespace {

std::atomic<int> g_threads{0};  // 0: pick from hardware

constexpr size_t kChunk = 1 << 16;

int effective_threads(size_t n_chunks) {
  int t = g_threads.load();
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t <= 0) t = 1;
  return static_cast<int>(std::min<size_t>(t, n_chunks));
}

// Runs fn(chunk_index, offset, count) over n split into fixed chunks; chunk
// seeds derive from the record seed, so the output is identical for any
// thread count.
template <typename Fn>
void for_chunks(size_t n, const Fn& fn) {
  const size_t n_chunks = (n + kChunk - 1) / kChunk;
  const int threads = effective_threads(n_chunks);
  if (threads <= 1) {
    for (size_t c = 0; c < n_chunks; ++c)
      fn(c, c * kChunk, std::min(kChunk, n - c * kChunk));
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
        fn(c, c * kChunk, std::min(kChunk, n - c * kChunk));
    });
  }
  for (auto& th : pool) th.join();
}

struct QSampler {
  std::vector<double> weights;          // eigenvalue mixture, cumulative
  std::vector<Vector> coeffs;           // phi_n / sqrt(n!), per component
  Complex center;
  double radius;

  explicit QSampler(const DensityMatrix& rho) {
    const int d = rho.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
    const double lmax = es.eigenvalues().maxCoeff();
    std::vector<double> lambda;
    for (int k = 0; k < d; ++k) {
      const double l = es.eigenvalues()(k);
      if (l > 1e-12 * lmax && l > 0.0) {
        lambda.push_back(l);
        Vector c = es.eigenvectors().col(k);
        for (int n = 2; n < d; ++n) c(n) /= std::sqrt(std::tgamma(n + 1.0));
        coeffs.push_back(std::move(c));
      }
    }
    double tot = 0.0;
    for (double l : lambda) tot += l;
    double run = 0.0;
    for (double l : lambda) {
      run += l / tot;
      weights.push_back(run);
    }
    weights.back() = 1.0;

    Matrix a = annihilation(d);
    const Complex mean = (rho.mat() * a).trace();
    double n_mean = 0.0;
    for (int k = 0; k < d; ++k) n_mean += k * rho.mat()(k, k).real();
    const double var = std::max(n_mean - std::norm(mean) + 1.0, 1e-9);
    center = mean;
    radius = 5.0 * std::sqrt(var);
  }

  // pi * Q_component(alpha) = e^{-|alpha|^2} |sum_n c_n conj(alpha)^n|^2
  double accept_probability(size_t k, Complex alpha) const {
    const Complex z = std::conj(alpha);
    const Vector& c = coeffs[k];
    Complex p = c(c.size() - 1);
    for (int n = static_cast<int>(c.size()) - 2; n >= 0; --n)
      p = p * z + c(n);
    return std::exp(-std::norm(alpha)) * std::norm(p);
  }

  void fill(Rng& rng, Complex* out, size_t count,
            std::atomic<uint64_t>& proposals,
            std::atomic<uint64_t>& accepts) const {
    uint64_t local_prop = 0;
    for (size_t i = 0; i < count;) {
      size_t k = 0;
      if (weights.size() > 1) {
        const double u = rng.uniform();
        while (k + 1 < weights.size() && u > weights[k]) ++k;
      }
      const Complex alpha = rng.uniform_disk(center, radius);
      ++local_prop;
      if (rng.uniform() < accept_probability(k, alpha)) {
        out[i++] = alpha;
        accepts.fetch_add(1, std::memory_order_relaxed);
      }
      if ((local_prop & 0xFFFFF) == 0) {
        proposals.fetch_add(local_prop, std::memory_order_relaxed);
        local_prop = 0;
        const uint64_t p = proposals.load();
        if (p > 200000 && accepts.load() < p / 10000)
          throw std::runtime_error(
              "sample_q: acceptance rate below 1e-4, proposal disk too large");
      }
    }
    proposals.fetch_add(local_prop, std::memory_order_relaxed);
  }
};

}  // namespace

void set_sampler_threads(int n) { g_threads.store(n); }

NoiseModel NoiseModel::vacuum_noise() { return {Kind::vacuum, 0.0, {0, 0}}; }

NoiseModel NoiseModel::thermal_noise(double n0, Complex offset) {
  NoiseModel m{Kind::thermal, n0, offset};
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (n0 < 0.0) throw std::invalid_argument("noise photon number must be >= 0");
  if (kind == Kind::vacuum && (n0 != 0.0 || offset != Complex(0, 0)))
    throw std::invalid_argument("vacuum noise means n0 = 0 and no offset");
}

std::vector<Complex> sample_q(const DensityMatrix& rho, size_t n,
                              uint64_t seed) {
  QSampler sampler(rho);
  std::vector<Complex> out(n);
  std::atomic<uint64_t> proposals{0}, accepts{0};
  for_chunks(n, [&](size_t chunk, size_t offset, size_t count) {
    Rng rng(derive_seed(seed, chunk));
    sampler.fill(rng, out.data() + offset, count, proposals, accepts);
  });
  return out;
}

MeasurementRecord sample_single_channel(const DensityMatrix& rho,
                                        const NoiseModel& noise, size_t n,
                                        uint64_t seed) {
  noise.validate();
  MeasurementRecord rec;
  rec.noise = noise;
  rec.seed = seed;
  rec.samples = sample_q(rho, n, derive_seed(seed, 0x51));
  if (noise.n0 == 0.0 && noise.offset == Complex(0, 0)) return rec;
  for_chunks(n, [&](size_t chunk, size_t offset, size_t count) {
    Rng rng(derive_seed(seed, 0xA000 + chunk));
    for (size_t i = 0; i < count; ++i) {
      const Complex gamma = noise.offset + rng.complex_gaussian(noise.n0);
      rec.samples[offset + i] += std::conj(gamma);
    }
  });
  return rec;
}

double Histogram2D::in_range() const {
  double s = 0.0;
  for (double c : counts) s += c;
  return s;
}

Histogram2D histogram(const std::vector<Complex>& samples,
                      const GridSpec& spec) {
  spec.validate();
  Histogram2D h;
  h.spec = spec;
  h.counts.assign(static_cast<size_t>(spec.size()), 0.0);
  h.total = samples.size();
  const double dx = spec.dx(), dy = spec.dy();
  for (const Complex& s : samples) {
    const int ix = static_cast<int>(std::floor((s.real() - spec.x_min) / dx));
    const int iy = static_cast<int>(std::floor((s.imag() - spec.y_min) / dy));
    if (ix < 0 || ix >= spec.nx || iy < 0 || iy >= spec.ny) {
      ++h.overflow;
    } else {
      h.counts[spec.index(ix, iy)] += 1.0;
    }
  }
  return h;
}

void ReadoutModel::validate() const {
  if (!(sigma0 > 0.0) || !(sigma1 > 0.0))
    throw std::invalid_argument("readout sigmas must be positive");
}

std::vector<double> sample_qubit_readout(int label, const ReadoutModel& model,
                                         size_t n, uint64_t seed) {
  model.validate();
  if (label != 0 && label != 1)
    throw std::invalid_argument("readout label must be 0 or 1");
  const double mu = label == 0 ? model.mu0 : model.mu1;
  const double sg = label == 0 ? model.sigma0 : model.sigma1;
  std::vector<double> out(n);
  Rng rng(derive_seed(seed, 0x9B));
  for (size_t i = 0; i < n; ++i) out[i] = mu + rng.gaussian(sg);
  return out;
}

std::vector<JointSample> sample_joint(const JointDensityMatrix& rho,
                                      PauliBasis basis,
                                      const NoiseModel& noise,
                                      const ReadoutModel& readout, size_t n,
                                      uint64_t seed) {
  readout.validate();
  Matrix block0 = conditioned_field_block(rho, basis, 0);
  Matrix block1 = conditioned_field_block(rho, basis, 1);
  double p0 = block0.trace().real();
  double p1 = block1.trace().real();
  const double tot = p0 + p1;
  if (!(tot > 0.0)) throw std::invalid_argument("joint state has zero trace");
  p0 /= tot;
  p1 /= tot;

  // outcome sequence first, then per-branch field batches, interleaved back
  std::vector<uint8_t> outcome(n);
  size_t n0 = 0;
  {
    Rng rng(derive_seed(seed, 0x0B));
    for (size_t i = 0; i < n; ++i) {
      outcome[i] = rng.uniform() < p0 ? 0 : 1;
      if (outcome[i] == 0) ++n0;
    }
  }
  std::vector<Complex> f0, f1;
  if (n0 > 0)
    f0 = sample_single_channel(DensityMatrix::project(block0), noise, n0,
                               derive_seed(seed, 0x0C))
             .samples;
  if (n - n0 > 0)
    f1 = sample_single_channel(DensityMatrix::project(block1), noise, n - n0,
                               derive_seed(seed, 0x0D))
             .samples;

  std::vector<JointSample> out(n);
  Rng qrng(derive_seed(seed, 0x0E));
  size_t i0 = 0, i1 = 0;
  for (size_t i = 0; i < n; ++i) {
    if (outcome[i] == 0) {
      out[i].s = f0[i0++];
      out[i].q = readout.mu0 + qrng.gaussian(readout.sigma0);
    } else {
      out[i].s = f1[i1++];
      out[i].q = readout.mu1 + qrng.gaussian(readout.sigma1);
    }
  }
  return out;
}

}  // namespace qtomo
