#include "qtomo/phasespace.hpp"

#include <cmath>
#include <stdexcept>

namespace qtomo {

void GridSpec::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid must be nonempty");
  if (!(x_max > x_min) || !(y_max > y_min))
    throw std::invalid_argument("grid extents inverted");
  if (static_cast<long long>(nx) * ny > 4096LL * 4096LL)
    throw std::invalid_argument("grid too large");
}

GridSpec GridSpec::square(double half_extent, int n) {
  return {-half_extent, half_extent, -half_extent, half_extent, n, n};
}

GridSpec GridSpec::centered(Complex c, double half_extent, int n) {
  return {c.real() - half_extent, c.real() + half_extent,
          c.imag() - half_extent, c.imag() + half_extent, n, n};
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  return a.x_min == b.x_min && a.x_max == b.x_max && a.y_min == b.y_min &&
         a.y_max == b.y_max && a.nx == b.nx && a.ny == b.ny;
}

PhaseGrid PhaseGrid::zeros(const GridSpec& spec) {
  spec.validate();
  return {spec, std::vector<double>(static_cast<size_t>(spec.size()), 0.0)};
}

double PhaseGrid::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * spec.cell_area();
}

PhaseGrid husimi_q(const DensityMatrix& rho, const GridSpec& spec) {
  PhaseGrid out = PhaseGrid::zeros(spec);
  const int d = rho.dim();
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      Vector v = coherent_amplitudes(spec.center(ix, iy), d);
      const Complex q = v.adjoint() * rho.mat() * v;
      out.at(ix, iy) = q.real() / M_PI;
    }
  }
  return out;
}

double qpd_point(const DensityMatrix& rho, Complex alpha, double s) {
  if (s > 0.0)
    throw std::invalid_argument("qpd supports s <= 0 only");
  const int d = rho.dim();
  const double kappa = (s + 1.0) / (s - 1.0);
  const double pref = 2.0 / (M_PI * (1.0 - s));

  // Sum_n kappa^n <alpha,n|rho|alpha,n> over displaced Fock columns.
  // Rows below d of column n+1 follow from rows below d of column n:
  //   v_{n+1}[m] = (sqrt(m) v_n[m-1] - conj(alpha) v_n[m]) / sqrt(n+1),
  // so the restricted block is exact, no truncation enters.
  Vector v = coherent_amplitudes(alpha, d);
  const Complex ac = std::conj(alpha);
  double acc = 0.0;
  double kpow = 1.0;
  const double series_floor =
      std::pow(std::sqrt(double(d)) + std::abs(alpha), 2.0) + 2.0 * d + 10.0;
  int quiet = 0;
  const int n_max = 4000;
  for (int n = 0; n < n_max; ++n) {
    const Complex q = v.adjoint() * rho.mat() * v;
    const double term = kpow * q.real();
    acc += term;
    const double weight = std::abs(kpow) * v.squaredNorm();
    if (weight < 1e-18) {
      if (++quiet >= 3 && n > series_floor) break;
    } else {
      quiet = 0;
    }
    if (n + 1 == n_max)
      throw std::runtime_error("qpd series failed to converge");
    Vector next(d);
    next(0) = -ac * v(0);
    for (int m = 1; m < d; ++m)
      next(m) = std::sqrt(double(m)) * v(m - 1) - ac * v(m);
    v = next / std::sqrt(double(n + 1));
    kpow *= kappa;
    if (kappa == 0.0 && n >= 0) break;  // Husimi limit: only n = 0 survives
  }
  return pref * acc;
}

PhaseGrid qpd(const DensityMatrix& rho, const GridSpec& spec, double s) {
  PhaseGrid out = PhaseGrid::zeros(spec);
  for (int iy = 0; iy < spec.ny; ++iy)
    for (int ix = 0; ix < spec.nx; ++ix)
      out.at(ix, iy) = qpd_point(rho, spec.center(ix, iy), s);
  return out;
}

PhaseGrid wigner(const DensityMatrix& rho, const GridSpec& spec) {
  return qpd(rho, spec, 0.0);
}

PhaseGrid gaussian_convolve(const PhaseGrid& grid, double t, double s) {
  if (!(s < t))
    throw std::invalid_argument("convolution requires s < t");
  const GridSpec& g = grid.spec;
  const double u = t - s;
  // separable kernel: (2/(pi u)) e^{-2|a|^2/u} = gx(dx) gy(dy)
  auto kernel_1d = [u](double delta) {
    return std::sqrt(2.0 / (M_PI * u)) * std::exp(-2.0 * delta * delta / u);
  };
  const double dx = g.dx(), dy = g.dy();

  std::vector<double> kx(g.nx), ky(g.ny);
  for (int k = 0; k < g.nx; ++k) kx[k] = kernel_1d(k * dx);
  for (int k = 0; k < g.ny; ++k) ky[k] = kernel_1d(k * dy);

  // x pass
  std::vector<double> tmp(static_cast<size_t>(g.size()), 0.0);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int io = 0; io < g.nx; ++io) {
      double acc = 0.0;
      for (int ii = 0; ii < g.nx; ++ii)
        acc += kx[std::abs(io - ii)] * grid.at(ii, iy);
      tmp[g.index(io, iy)] = acc * dx;
    }
  }
  // y pass
  PhaseGrid out = PhaseGrid::zeros(g);
  for (int io = 0; io < g.ny; ++io) {
    for (int ix = 0; ix < g.nx; ++ix) {
      double acc = 0.0;
      for (int ii = 0; ii < g.ny; ++ii)
        acc += ky[std::abs(io - ii)] * tmp[g.index(ix, ii)];
      out.at(ix, io) = acc * dy;
    }
  }
  return out;
}

double detection_efficiency(double n0) {
  if (n0 < 0.0) throw std::invalid_argument("noise photon number must be >= 0");
  return 1.0 / (1.0 + n0);
}

}  // namespace qtomo
