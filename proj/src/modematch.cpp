#include "qtomo/modematch.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "qtomo/rng.hpp"

namespace qtomo {

double FilterProfile::norm_squared() const {
  double s = 0.0;
  for (const Complex& w : weights) s += std::norm(w);
  return s * dt;
}

FilterProfile matched_filter(double kappa, double t0, double dt,
                             double duration) {
  if (!(kappa > 0.0) || !(dt > 0.0) || !(duration > 0.0))
    throw std::invalid_argument("kappa, dt and duration must be positive");
  if (t0 < 0.0 || t0 >= duration)
    throw std::invalid_argument("t0 must lie inside the window");
  if (duration - t0 < 5.0 / kappa)
    std::cerr << "matched_filter: window catches only "
              << (1.0 - std::exp(-kappa * (duration - t0))) * 100.0
              << "% of the mode\n";
  FilterProfile f;
  f.dt = dt;
  const size_t n = static_cast<size_t>(std::ceil(duration / dt));
  f.weights.assign(n, Complex(0, 0));
  for (size_t k = 0; k < n; ++k) {
    const double t = k * dt;
    if (t >= t0)
      f.weights[k] = std::sqrt(kappa) * std::exp(-0.5 * kappa * (t - t0));
  }
  const double norm = std::sqrt(f.norm_squared());
  for (Complex& w : f.weights) w /= norm;
  return f;
}

Complex apply_filter(const TimeSeries& ts, const FilterProfile& filter) {
  if (ts.dt != filter.dt)
    throw std::invalid_argument("time step mismatch");
  const size_t n = std::min(ts.size(), filter.size());
  Complex acc(0, 0);
  for (size_t k = 0; k < n; ++k) acc += filter.weights[k] * ts.samples[k];
  return acc * ts.dt;
}

double mode_match_efficiency(const FilterProfile& f, const FilterProfile& g) {
  if (f.dt != g.dt) throw std::invalid_argument("time step mismatch");
  const size_t n = std::min(f.size(), g.size());
  Complex ov(0, 0);
  for (size_t k = 0; k < n; ++k) ov += std::conj(f.weights[k]) * g.weights[k];
  ov *= f.dt;
  return std::norm(ov) / (f.norm_squared() * g.norm_squared());
}

TimeSeries simulate_decay_trace(Complex alpha0, double kappa,
                                double noise_density, double dt,
                                double duration, uint64_t seed) {
  if (!(kappa > 0.0) || !(dt > 0.0) || !(duration > 0.0))
    throw std::invalid_argument("kappa, dt and duration must be positive");
  if (noise_density < 0.0)
    throw std::invalid_argument("noise density must be >= 0");
  TimeSeries ts;
  ts.dt = dt;
  const size_t n = static_cast<size_t>(std::ceil(duration / dt));
  ts.samples.resize(n);
  Rng rng(derive_seed(seed, 0x3D));
  const double var = noise_density / dt;
  for (size_t k = 0; k < n; ++k) {
    ts.samples[k] =
        std::sqrt(kappa) * alpha0 * std::exp(-0.5 * kappa * (k * dt));
    if (var > 0.0) ts.samples[k] += rng.complex_gaussian(var);
  }
  return ts;
}

}  // namespace qtomo
