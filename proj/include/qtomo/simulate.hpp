#pragma once

#include <cstdint>
#include <vector>

#include "qtomo/fock.hpp"
#include "qtomo/phasespace.hpp"

namespace qtomo {

// Detector mode state h. The standard model is thermal with mean photon
// number n0; `offset` adds a coherent displacement so tests can exercise a
// non-phase-symmetric reference. vacuum means n0 == 0 and offset == 0.
struct NoiseModel {
  enum class Kind { vacuum, thermal };

  Kind kind = Kind::vacuum;
  double n0 = 0.0;
  Complex offset{0.0, 0.0};

  static NoiseModel vacuum_noise();
  static NoiseModel thermal_noise(double n0, Complex offset = {0.0, 0.0});
  void validate() const;
};

// Complex-amplitude samples S = alpha + conj(gamma), alpha ~ Q_rho,
// gamma ~ P_h.
struct MeasurementRecord {
  std::vector<Complex> samples;
  NoiseModel noise;
  uint64_t seed = 0;

  size_t count() const { return samples.size(); }
};

// Worker count for the samplers. 0 (the default) means use the hardware
// count. Results are independent of this setting: work is split into fixed
// chunks whose generator seeds derive only from the record seed.
void set_sampler_threads(int n);

// i.i.d. draws from the Husimi Q of rho. Rejection sampling: uniform proposal
// on a disk of radius 5 sigma around <a>, acceptance pi*Q(alpha) <= 1.
// Throws std::runtime_error if the acceptance rate collapses below 1e-4.
std::vector<Complex> sample_q(const DensityMatrix& rho, size_t n,
                              uint64_t seed);

MeasurementRecord sample_single_channel(const DensityMatrix& rho,
                                        const NoiseModel& noise, size_t n,
                                        uint64_t seed);

// Binned counts over a grid; samples outside the extents are tallied in
// `overflow` and excluded from `counts`. counts are f64 to match the file
// format and to allow fractional masses in derived histograms.
struct Histogram2D {
  GridSpec spec;
  std::vector<double> counts;
  uint64_t total = 0;
  uint64_t overflow = 0;

  double in_range() const;  // sum of counts
};

Histogram2D histogram(const std::vector<Complex>& samples,
                      const GridSpec& spec);

// Gaussian single-shot readout voltage model for the two qubit states.
struct ReadoutModel {
  double mu0 = 0, sigma0 = 1, mu1 = 0, sigma1 = 1;
  void validate() const;
};

// label 0 draws N(mu0, sigma0^2), label 1 draws N(mu1, sigma1^2).
std::vector<double> sample_qubit_readout(int label, const ReadoutModel& model,
                                         size_t n, uint64_t seed);

struct JointSample {
  Complex s;
  double q;
};

// Per trial: project the qubit in the chosen basis with Born probabilities,
// draw the field sample from the conditioned field state through the
// single-channel model, draw the readout voltage for the outcome.
std::vector<JointSample> sample_joint(const JointDensityMatrix& rho,
                                      PauliBasis basis,
                                      const NoiseModel& noise,
                                      const ReadoutModel& readout, size_t n,
                                      uint64_t seed);

}  // namespace qtomo
