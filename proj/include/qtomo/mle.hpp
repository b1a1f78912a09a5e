#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtomo/fock.hpp"
#include "qtomo/moments.hpp"
#include "qtomo/phasespace.hpp"
#include "qtomo/simulate.hpp"

namespace qtomo {

// Discretized POVM over a grid of outcome labels. Element j is
// weights[j] * op(j); op(j) excludes the bin area. Rank-one sets (ideal
// heterodyne) store probe vectors, noise-adapted sets store dense operators.
struct PovmSet {
  int dim = 0;
  std::vector<Complex> labels;
  std::vector<double> weights;
  Matrix probes;             // rows are probe vectors; op = v v†/pi
  std::vector<Matrix> ops;   // dense alternative
  Matrix g;                  // sum_j weights[j] op(j)
  Matrix g_pinv;             // pseudo-inverse, eigenvalues < 1e-6 max dropped

  bool rank1() const { return ops.empty(); }
  size_t size() const { return weights.size(); }
  Matrix op(size_t j) const;
};

// Eigendecomposition inverse of a positive semidefinite matrix; eigenvalues
// below 1e-6 of the largest are dropped.
Matrix psd_pseudo_inverse(const Matrix& g);

// Projectors |alpha_j><alpha_j|/pi at bin centers, weight = bin area.
PovmSet povm_ideal(const GridSpec& spec, int dim);

// Noise-adapted elements T(alpha_j) rho_h T†(alpha_j)/pi on a dim-dimensional
// signal space, built from exact displaced-Fock blocks.
PovmSet povm_noisy(const DensityMatrix& rho_h, const GridSpec& spec, int dim);

struct LikelihoodReport {
  int iterations = 0;
  double final_log_likelihood = 0.0;
  double delta_last = 0.0;
  bool converged = false;
  bool monotone = true;      // no accepted step decreased the likelihood
  int regularized_bins = 0;  // bins with data but vanishing model probability
  double stationary_gap = 0.0;  // max-norm change of rho in the last step
  std::string engine;
};

// Expectation-maximization iteration rho -> N G^-1 R rho R G^-1 with
// R = sum_j f_j op_j w_j / Tr[rho op_j w_j], falling back to a diluted step
// (I mixed in) whenever the full step would decrease the likelihood.
// `counts` are per-bin frequencies aligned with the POVM elements; they are
// used as given (normalize for a single measurement run).
std::pair<DensityMatrix, LikelihoodReport> iterate_rhor(
    const DensityMatrix& initial, const PovmSet& povm,
    const std::vector<double>& counts, double tol = 1e-10,
    int max_iter = 2000);

// Normalized per-bin frequencies of a histogram (overflow excluded).
std::vector<double> frequencies(const Histogram2D& hist);

// Detector-state estimate from a vacuum-signal reference histogram: the data
// histogram is point-reflected (S -> -S) and fed to the ideal-POVM iteration.
// dim = 0 picks ceil(10 * N0_est) + 6 from the histogram's second moment.
std::pair<DensityMatrix, LikelihoodReport> reconstruct_noise_state(
    const Histogram2D& reference, int dim = 0, double tol = 1e-10,
    int max_iter = 2000);

// Moment-constrained fit: maximizes
//   -sum_{n,m} |<(a†)^n a^m> - Tr[rho (a†)^n a^m]|^2 / sigma^2
// over rho = C C†/Tr(C C†) with lower-triangular C, BFGS ascent from the
// maximally mixed state plus three fixed-seed random restarts.
std::pair<DensityMatrix, LikelihoodReport> mle_from_moments(
    const MomentTable& normal_a, int dim);

// Same fit for an arbitrary observable set: finds the density matrix whose
// expectations match `targets` in the 1/sigma^2-weighted least-squares sense.
// When `init` is given it replaces the maximally mixed starting point.
std::pair<DensityMatrix, LikelihoodReport> mle_from_operators(
    const std::vector<Matrix>& ops, const std::vector<Complex>& targets,
    const std::vector<double>& sigmas, int dim, const Matrix* init = nullptr);

// Record-level bootstrap of the moment-fit pipeline; returns the fidelity of
// each resampled reconstruction against the target.
std::vector<double> bootstrap_fidelities(const MeasurementRecord& record,
                                         const MomentTable& noise_h,
                                         int max_order, int dim,
                                         const FockVector& target,
                                         int n_resamples, uint64_t seed);

}  // namespace qtomo
