#pragma once

#include <vector>

#include "qtomo/fock.hpp"
#include "qtomo/simulate.hpp"

namespace qtomo {

// Which operator product an entry (n, m) stands for:
//   anti_normal_s : <(S†)^n S^m>    measured-amplitude moments
//   normal_a      : <(a†)^n a^m>    signal-mode normally ordered
//   anti_normal_h : <h^n (h†)^m>    noise-mode anti-normally ordered
enum class Ordering { anti_normal_s, normal_a, anti_normal_h };

// Triangular table over n, m >= 0 with n + m <= max_order. Entry (0,0)
// defaults to 1 with zero error; only the Pauli-weighted joint tables
// overwrite it. Supported max_order <= 12.
class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(int max_order, Ordering tag);

  int max_order() const { return max_order_; }
  Ordering tag() const { return tag_; }
  bool has(int n, int m) const;
  Complex value(int n, int m) const;
  double sigma(int n, int m) const;
  void set(int n, int m, Complex v, double sigma);

  // max |value(n,m) - conj(value(m,n))|.
  double hermiticity_defect() const;

 private:
  int idx(int n, int m) const;
  int max_order_ = 0;
  Ordering tag_ = Ordering::anti_normal_s;
  std::vector<Complex> values_;
  std::vector<double> sigmas_;
};

// Empirical <(S†)^n S^m> with per-entry standard errors
// sqrt(Var|z - mean|^2 / count). Throws std::invalid_argument for an empty
// record or max_order > 12.
MomentTable empirical_s_moments(const std::vector<Complex>& samples,
                                int max_order);
MomentTable empirical_s_moments(const MeasurementRecord& record,
                                int max_order);
// From binned data: bin centers weighted by counts. Accepts raw counts or
// fractional masses; normalized internally by the in-range sum. The record
// overload is exact; this one carries the binning resolution.
MomentTable empirical_s_moments(const Histogram2D& hist, int max_order);

// Vacuum-signal reference measurement gives the noise-mode moments directly:
// <h^n (h†)^m> = <(S†)^n S^m>|_vacuum-signal. Pure relabeling.
MomentTable noise_moments_from_reference(const MomentTable& reference);

// Solves
//   <(S†)^n S^m> = sum_{i<=n, j<=m} C(n,i) C(m,j) <(a†)^i a^j> <h^{n-i}(h†)^{m-j}>
// for the signal moments, order by order in total order with unit leading
// coefficient. Standard errors propagate linearly assuming independent
// entries.
MomentTable deconvolve(const MomentTable& signal_s,
                       const MomentTable& noise_h);

// Forward map of the same relation; used for residual checks.
MomentTable convolve_with_noise(const MomentTable& signal_a,
                                const MomentTable& noise_h);

// <m|rho|n> = 1/sqrt(n! m!) sum_l (-1)^l / l! <(a†)^{n+l} a^{m+l}>, series
// truncated where the table ends. Requires 2*(dim-1) <= max_order. Returns a
// Hermitian matrix for a Hermitian table; positivity is not guaranteed.
Matrix moments_to_density(const MomentTable& normal_a, int dim);

// |<(a†)^N a^N>| + 3 sigma; an upper bound on the population weight at and
// above Fock level N.
double truncation_bound(const MomentTable& normal_a, int n_cut);

// Third-order cumulants of the pair (a†, a) from normally ordered moments;
// k_{nm} carries n daggers. Identically zero for Gaussian states.
struct ThirdOrderCumulants {
  Complex k30, k21, k12, k03;
};
ThirdOrderCumulants third_order_cumulants(const MomentTable& normal_a);

// ---- analytic tables -----------------------------------------------------

// <(a†)^n a^m> = conj(alpha)^n alpha^m.
MomentTable coherent_moment_table(Complex alpha, int max_order);

// <h^p (h†)^q> for thermal h: delta_{pq} p! (n0+1)^p.
MomentTable thermal_noise_table(double n0, int max_order);

// <h^p (h†)^q> for thermal h displaced by beta: classical moments of a
// complex Gaussian with mean beta and variance n0 + 1.
MomentTable displaced_thermal_noise_table(Complex beta, double n0,
                                          int max_order);

// Exact normally ordered moments of an explicit state.
MomentTable moment_table_from_density(const DensityMatrix& rho,
                                      int max_order);

// Copy with every error bar replaced (entry (0,0) stays exact).
MomentTable with_uniform_sigma(MomentTable table, double sigma);

}  // namespace qtomo
