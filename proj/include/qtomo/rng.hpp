#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qtomo {

// splitmix64; used to derive independent stream seeds from a user seed.
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
  return mix_seed(seed ^ mix_seed(salt));
}

// All sampling goes through this wrapper so the draw order is pinned by our
// code, not by library internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform() { return unit_(eng_); }

  double gaussian(double sigma) {
    return sigma == 0.0 ? 0.0 : normal_(eng_) * sigma;
  }

  // E|z|^2 = var; quadratures independent with variance var/2 each.
  std::complex<double> complex_gaussian(double var) {
    if (var <= 0.0) return {0.0, 0.0};
    const double s = std::sqrt(0.5 * var);
    const double re = normal_(eng_) * s;
    const double im = normal_(eng_) * s;
    return {re, im};
  }

  std::complex<double> uniform_disk(std::complex<double> center,
                                    double radius) {
    const double r = radius * std::sqrt(unit_(eng_));
    const double phi = 2.0 * M_PI * unit_(eng_);
    return center + std::complex<double>(r * std::cos(phi), r * std::sin(phi));
  }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qtomo
