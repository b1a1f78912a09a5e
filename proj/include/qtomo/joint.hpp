#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "qtomo/fock.hpp"
#include "qtomo/mle.hpp"
#include "qtomo/moments.hpp"
#include "qtomo/simulate.hpp"

namespace qtomo {

// Normalized readout-voltage histograms for the two prepared qubit states,
// shared bin edges.
struct ReadoutCalibration {
  std::vector<double> edges;  // nq + 1
  std::vector<double> p0, p1;

  int nq() const { return static_cast<int>(p0.size()); }
  // Overlapping probability mass; 0 for perfectly separated states.
  double overlap() const;
  void validate() const;
};

ReadoutCalibration calibrate_readout(const std::vector<double>& q0,
                                     const std::vector<double>& q1, int nq,
                                     double q_min, double q_max);

// 3D counts over (S, q) for one measurement basis. Index
// (iq * ny + iy) * nx + ix, x fastest.
struct Joint3DHistogram {
  PauliBasis basis = PauliBasis::z;
  GridSpec spec;
  std::vector<double> q_edges;  // nq + 1
  std::vector<double> counts;
  uint64_t total = 0;
  uint64_t overflow = 0;

  int nq() const { return static_cast<int>(q_edges.size()) - 1; }
  double& at(int ix, int iy, int iq) {
    return counts[(static_cast<size_t>(iq) * spec.ny + iy) * spec.nx + ix];
  }
  double at(int ix, int iy, int iq) const {
    return counts[(static_cast<size_t>(iq) * spec.ny + iy) * spec.nx + ix];
  }
};

Joint3DHistogram joint_histogram(const std::vector<JointSample>& samples,
                                 PauliBasis basis, const GridSpec& spec,
                                 int nq, double q_min, double q_max);

// Per-S-bin <sigma_i> from a nonnegative least-squares fit of the q trace to
// c0 p0 + c1 p1. Bins with fewer than min_counts samples are flagged invalid.
struct ConditionedPauli {
  GridSpec spec;
  std::vector<double> value;   // clipped to [-1, 1]
  std::vector<uint8_t> valid;
  std::vector<double> c0, c1;  // fitted branch masses (counts)
};

ConditionedPauli conditioned_pauli(const Joint3DHistogram& hist,
                                   const ReadoutCalibration& calib,
                                   int min_counts = 20);

// Splits the q-marginal into the two conditioned field histograms
// D_{s,i}(S) ∝ (1 ± <sigma_i>_S)/2 * sum_q D_i(S, q), each normalized to unit
// mass. Invalid bins carry zero mass. The stored totals estimate the
// effective sample count in each branch.
std::pair<Histogram2D, Histogram2D> conditioned_histograms(
    const Joint3DHistogram& hist, const ConditionedPauli& pauli);

// Joint moment tables: sigma_i-weighted normally ordered field moments
//   table_i(n, m) = <(a†)^n a^m sigma_i>, entry (0,0) = <sigma_i>,
// plus the unconditioned field table (basis average).
struct JointMoments {
  MomentTable field;              // <(a†)^n a^m>
  std::array<MomentTable, 3> pauli;  // x, y, z
};

JointMoments joint_moments(const std::array<Joint3DHistogram, 3>& hists,
                           const ReadoutCalibration& calib,
                           const MomentTable& noise_h, int max_order,
                           int min_counts = 20);

// Block reconstruction: <s,m|rho|s',n> from the four tables through the
// moment->density map M:
//   rho_00 = M(field + z)/2, rho_11 = M(field - z)/2, rho_10 = M(x + i y)/2.
// The linear map amplifies moment noise and does not enforce positivity, so
// by default the blocks only seed a PSD-constrained weighted fit to the same
// tables; polish=false returns the raw Hermitized blocks.
JointDensityMatrix joint_density_from_moments(const JointMoments& jm,
                                              int field_dim,
                                              bool polish = true);

// Field POVM tensored with both projectors of the chosen basis; element
// order: (bin 0, s=0), (bin 0, s=1), (bin 1, s=0), ...
PovmSet joint_povm(const PovmSet& field, PauliBasis basis);

// Iterative MLE over the union of the three basis POVMs. Per-bin branch
// masses come from the same q-trace fit used by the moment path.
std::pair<JointDensityMatrix, LikelihoodReport> joint_mle(
    const std::array<Joint3DHistogram, 3>& hists,
    const ReadoutCalibration& calib, const DensityMatrix& rho_h,
    int field_dim, double tol = 1e-10, int max_iter = 1000);

}  // namespace qtomo
