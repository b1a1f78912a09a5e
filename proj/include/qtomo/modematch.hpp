#pragma once

#include <cstdint>
#include <vector>

#include "qtomo/fock.hpp"

namespace qtomo {

// Uniformly sampled complex envelope starting at t = 0.
struct TimeSeries {
  double dt = 0.0;
  std::vector<Complex> samples;

  size_t size() const { return samples.size(); }
};

// Temporal mode filter, normalized so sum |f|^2 dt = 1.
struct FilterProfile {
  double dt = 0.0;
  std::vector<Complex> weights;

  size_t size() const { return weights.size(); }
  double norm_squared() const;  // sum |f|^2 dt
};

// f(t) = sqrt(kappa) exp(-kappa (t - t0)/2) for t >= t0 and 0 before,
// sampled on [0, duration) and renormalized; t0 delays the envelope on the
// shared clock. Warns on stderr when less than 5/kappa of the tail fits.
FilterProfile matched_filter(double kappa, double t0, double dt,
                             double duration);

// a_hat = sum f_k s_k dt (left-endpoint Riemann sum, no conjugation; matched
// filters are real).
Complex apply_filter(const TimeSeries& ts, const FilterProfile& filter);

// |<f, g>|^2 / (||f||^2 ||g||^2); 4 kappa kappa' / (kappa + kappa')^2 for two
// exponential filters.
double mode_match_efficiency(const FilterProfile& f, const FilterProfile& g);

// s(t) = sqrt(kappa) alpha0 exp(-kappa t / 2) + xi(t) with complex white
// noise of the given one-sided density (per-sample variance density/dt).
TimeSeries simulate_decay_trace(Complex alpha0, double kappa,
                                double noise_density, double dt,
                                double duration, uint64_t seed);

}  // namespace qtomo
