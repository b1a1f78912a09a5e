#pragma once

#include <cstdint>
#include <vector>

#include "qtomo/fock.hpp"
#include "qtomo/moments.hpp"
#include "qtomo/phasespace.hpp"

namespace qtomo {

// Beam-splitter pair S1 = a + v + sqrt(2) h1†, S2 = a - v + sqrt(2) h2† with
// thermal amplifier modes h1, h2. The joint distribution factorizes as
//   P(S1,S2) = exp(-|S1-S2|^2 / (2 n_tot)) / (2 pi n_tot) * W_a(sbar, s)
// where sbar = w1 S1 + w2 S2. The weight on each channel involves the *other*
// channel's noise: the less noisy channel is the better estimate of a.
struct NoisePair {
  double n1 = 0.0, n2 = 0.0;

  double n_tot() const { return n1 + n2 + 2.0; }
  double s() const { return -1.0 - (4.0 * n1 * n2 + 2.0 * n1 + 2.0 * n2) / n_tot(); }
  double w1() const { return (n2 + 1.0) / n_tot(); }
  double w2() const { return (n1 + 1.0) / n_tot(); }
  void validate() const;
};

struct TwoChannelRecord {
  std::vector<Complex> s1, s2;
  NoisePair noise;
  uint64_t seed = 0;

  size_t count() const { return s1.size(); }
};

// Factorized sampler: sbar = alpha + conj(gamma) with alpha ~ Q_a and gamma a
// complex Gaussian of variance (-1-s)/2, delta an independent complex
// Gaussian of variance 2 n_tot; S1 = sbar + w2 delta, S2 = sbar - w1 delta.
TwoChannelRecord sample_two_channel(const DensityMatrix& rho, const NoisePair& noise,
                                    size_t n, uint64_t seed);

// <(a†)^n a^m> = mean[(conj S1)^n S2^m]; cross moments are insensitive to the
// amplifier noise. Tag normal_a.
MomentTable cross_moments(const TwoChannelRecord& record, int max_order);

// Pointwise positive-P value; nonnegative for every state since s <= -1.
double positive_p_density(const DensityMatrix& rho, const NoisePair& noise,
                          Complex s1, Complex s2);

struct PointEstimate {
  double value = 0.0;
  double sigma = 0.0;
  double imag_part = 0.0;
  bool reliable = false;  // sigma <= |value|
};

// Monte-Carlo contraction of the record with the coherent-state kernel
// exp(-|alpha|^2 + conj(alpha) S1 + conj(S2) alpha - conj(S2) S1)/pi,
// whose expectation is Q_a(alpha).
PointEstimate q_from_positive_p_point(const TwoChannelRecord& record,
                                      Complex alpha);

struct QEstimate {
  PhaseGrid q;
  PhaseGrid sigma;
  PhaseGrid imag_part;
  std::vector<uint8_t> reliable;
};

QEstimate positive_p_to_q(const TwoChannelRecord& record,
                          const GridSpec& spec);

// rho = mean over pairs of |S1><S2| / <S2|S1> truncated to dim, hermitized
// and trace-normalized. Positivity is not guaranteed; feed the moment fit or
// the iterative engine for a physical estimate.
DensityMatrix density_from_positive_p(const TwoChannelRecord& record, int dim);

}  // namespace qtomo
