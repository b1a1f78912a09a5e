#pragma once

#include <vector>

#include "qtomo/fock.hpp"

namespace qtomo {

// Rectangular grid of bin centers in the complex plane; alpha = x + iy.
struct GridSpec {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  int nx = 0, ny = 0;

  double dx() const { return (x_max - x_min) / nx; }
  double dy() const { return (y_max - y_min) / ny; }
  double cell_area() const { return dx() * dy(); }
  int size() const { return nx * ny; }
  Complex center(int ix, int iy) const {
    return {x_min + (ix + 0.5) * dx(), y_min + (iy + 0.5) * dy()};
  }
  // Flattened index, x fastest.
  int index(int ix, int iy) const { return iy * nx + ix; }
  void validate() const;

  static GridSpec square(double half_extent, int n);
  static GridSpec centered(Complex center, double half_extent, int n);
};

bool operator==(const GridSpec& a, const GridSpec& b);

// Real-valued field sampled at grid centers. values[iy*nx+ix].
struct PhaseGrid {
  GridSpec spec;
  std::vector<double> values;

  double& at(int ix, int iy) { return values[spec.index(ix, iy)]; }
  double at(int ix, int iy) const { return values[spec.index(ix, iy)]; }
  // Cell-sum quadrature of the stored density.
  double integral() const;

  static PhaseGrid zeros(const GridSpec& spec);
};

// Husimi Q(alpha) = <alpha|rho|alpha>/pi, exact for states supported inside
// the truncation since the raw probe amplitudes carry the full Gaussian
// weight. Pointwise in [0, 1/pi]; integrates to 1 over the whole plane.
PhaseGrid husimi_q(const DensityMatrix& rho, const GridSpec& spec);

// s-parametrized quasiprobability, s <= 0 (s = 0 Wigner, s = -1 Husimi,
// s = -1-2*N0 is the distribution a detector with noise photon number N0
// measures). Evaluated through the displaced generalized-parity series
// (2/(pi(1-s))) sum_n kappa^n <alpha,n|rho|alpha,n>, kappa = (s+1)/(s-1),
// with exact displaced-Fock columns. Throws std::invalid_argument for s > 0.
double qpd_point(const DensityMatrix& rho, Complex alpha, double s);

PhaseGrid qpd(const DensityMatrix& rho, const GridSpec& spec, double s);

// Wigner function; qpd at s = 0.
PhaseGrid wigner(const DensityMatrix& rho, const GridSpec& spec);

// Maps a distribution at parameter t to one at s < t by convolution with
// (2/(pi(t-s))) exp(-2|alpha|^2/(t-s)), cell-area weighted and separable in
// x/y. Normalization is preserved up to grid truncation.
PhaseGrid gaussian_convolve(const PhaseGrid& grid, double t, double s);

// eta = 1/(1 + N0).
double detection_efficiency(double n0);

}  // namespace qtomo
