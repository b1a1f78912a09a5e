#include "qtomo/joint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qtomo {

namespace {

using LComplex = std::complex<long double>;

constexpr PauliBasis kBases[3] = {PauliBasis::x, PauliBasis::y, PauliBasis::z};

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_matching(const std::array<Joint3DHistogram, 3>& hists) {
  for (int i = 1; i < 3; ++i) {
    require(hists[i].spec == hists[0].spec, "histogram grids differ");
    require(hists[i].q_edges == hists[0].q_edges, "readout edges differ");
  }
}

// Two-variable nonnegative least squares for t ~ c0 p0 + c1 p1.
void fit_branch_masses(const std::vector<double>& p0,
                       const std::vector<double>& p1,
                       const std::vector<double>& t, double& c0, double& c1) {
  double g00 = 0, g01 = 0, g11 = 0, b0 = 0, b1 = 0, tsum = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    g00 += p0[i] * p0[i];
    g01 += p0[i] * p1[i];
    g11 += p1[i] * p1[i];
    b0 += p0[i] * t[i];
    b1 += p1[i] * t[i];
    tsum += t[i];
  }
  const double det = g00 * g11 - g01 * g01;
  if (det > 1e-12 * g00 * g11) {
    c0 = (g11 * b0 - g01 * b1) / det;
    c1 = (g00 * b1 - g01 * b0) / det;
    if (c0 >= 0.0 && c1 >= 0.0) return;
  } else {
    // indistinguishable references: split the mass
    c0 = c1 = 0.5 * tsum;
    return;
  }
  // active set: one coefficient clamped to zero
  const double c0_only = g00 > 0 ? std::max(b0 / g00, 0.0) : 0.0;
  const double c1_only = g11 > 0 ? std::max(b1 / g11, 0.0) : 0.0;
  const double r0 = c0_only * c0_only * g00 - 2.0 * c0_only * b0;
  const double r1 = c1_only * c1_only * g11 - 2.0 * c1_only * b1;
  if (r0 <= r1) {
    c0 = c0_only;
    c1 = 0.0;
  } else {
    c0 = 0.0;
    c1 = c1_only;
  }
}

}  // namespace

double ReadoutCalibration::overlap() const {
  double o = 0.0;
  for (size_t i = 0; i < p0.size(); ++i) o += std::min(p0[i], p1[i]);
  return o;
}

void ReadoutCalibration::validate() const {
  require(edges.size() >= 2, "need at least one readout bin");
  require(p0.size() == edges.size() - 1 && p1.size() == p0.size(),
          "calibration sizes inconsistent");
  for (size_t i = 1; i < edges.size(); ++i)
    require(edges[i] > edges[i - 1], "readout edges must increase");
  double s0 = 0, s1 = 0;
  for (size_t i = 0; i < p0.size(); ++i) {
    require(p0[i] >= 0.0 && p1[i] >= 0.0, "negative calibration mass");
    s0 += p0[i];
    s1 += p1[i];
  }
  require(std::abs(s0 - 1.0) < 1e-9 && std::abs(s1 - 1.0) < 1e-9,
          "calibration histograms must be normalized");
}

ReadoutCalibration calibrate_readout(const std::vector<double>& q0,
                                     const std::vector<double>& q1, int nq,
                                     double q_min, double q_max) {
  require(nq >= 1, "need at least one readout bin");
  require(q_max > q_min, "readout range must be nonempty");
  ReadoutCalibration cal;
  cal.edges.resize(nq + 1);
  const double dq = (q_max - q_min) / nq;
  for (int i = 0; i <= nq; ++i) cal.edges[i] = q_min + i * dq;
  cal.p0.assign(nq, 0.0);
  cal.p1.assign(nq, 0.0);
  auto fill = [&](const std::vector<double>& q, std::vector<double>& p) {
    double in_range = 0.0;
    for (double v : q) {
      const int i = static_cast<int>(std::floor((v - q_min) / dq));
      if (i >= 0 && i < nq) {
        p[i] += 1.0;
        in_range += 1.0;
      }
    }
    require(in_range > 0.0, "no readout samples in range");
    for (double& v : p) v /= in_range;
  };
  fill(q0, cal.p0);
  fill(q1, cal.p1);
  return cal;
}

Joint3DHistogram joint_histogram(const std::vector<JointSample>& samples,
                                 PauliBasis basis, const GridSpec& spec,
                                 int nq, double q_min, double q_max) {
  spec.validate();
  require(nq >= 1, "need at least one readout bin");
  require(q_max > q_min, "readout range must be nonempty");
  Joint3DHistogram h;
  h.basis = basis;
  h.spec = spec;
  h.q_edges.resize(nq + 1);
  const double dq = (q_max - q_min) / nq;
  for (int i = 0; i <= nq; ++i) h.q_edges[i] = q_min + i * dq;
  h.counts.assign(static_cast<size_t>(spec.size()) * nq, 0.0);
  h.total = samples.size();
  const double dx = spec.dx(), dy = spec.dy();
  for (const JointSample& s : samples) {
    const int ix = static_cast<int>(std::floor((s.s.real() - spec.x_min) / dx));
    const int iy = static_cast<int>(std::floor((s.s.imag() - spec.y_min) / dy));
    const int iq = static_cast<int>(std::floor((s.q - q_min) / dq));
    if (ix < 0 || ix >= spec.nx || iy < 0 || iy >= spec.ny || iq < 0 ||
        iq >= nq) {
      ++h.overflow;
    } else {
      h.at(ix, iy, iq) += 1.0;
    }
  }
  return h;
}

ConditionedPauli conditioned_pauli(const Joint3DHistogram& hist,
                                   const ReadoutCalibration& calib,
                                   int min_counts) {
  calib.validate();
  require(calib.nq() == hist.nq(), "calibration and histogram bins differ");
  const GridSpec& g = hist.spec;
  ConditionedPauli out;
  out.spec = g;
  const size_t nbins = static_cast<size_t>(g.size());
  out.value.assign(nbins, 0.0);
  out.valid.assign(nbins, 0);
  out.c0.assign(nbins, 0.0);
  out.c1.assign(nbins, 0.0);
  std::vector<double> trace(hist.nq());
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      double tot = 0.0;
      for (int iq = 0; iq < hist.nq(); ++iq) {
        trace[iq] = hist.at(ix, iy, iq);
        tot += trace[iq];
      }
      if (tot < min_counts) continue;
      const size_t i = g.index(ix, iy);
      fit_branch_masses(calib.p0, calib.p1, trace, out.c0[i], out.c1[i]);
      const double mass = out.c0[i] + out.c1[i];
      if (!(mass > 0.0)) continue;
      out.valid[i] = 1;
      out.value[i] =
          std::clamp((out.c0[i] - out.c1[i]) / mass, -1.0, 1.0);
    }
  }
  return out;
}

std::pair<Histogram2D, Histogram2D> conditioned_histograms(
    const Joint3DHistogram& hist, const ConditionedPauli& pauli) {
  require(hist.spec == pauli.spec, "grid mismatch");
  const GridSpec& g = hist.spec;
  Histogram2D h0, h1;
  h0.spec = h1.spec = g;
  h0.counts.assign(static_cast<size_t>(g.size()), 0.0);
  h1.counts.assign(static_cast<size_t>(g.size()), 0.0);
  double m0 = 0.0, m1 = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const size_t i = g.index(ix, iy);
      if (!pauli.valid[i]) continue;
      double tot = 0.0;
      for (int iq = 0; iq < hist.nq(); ++iq) tot += hist.at(ix, iy, iq);
      h0.counts[i] = 0.5 * (1.0 + pauli.value[i]) * tot;
      h1.counts[i] = 0.5 * (1.0 - pauli.value[i]) * tot;
      m0 += h0.counts[i];
      m1 += h1.counts[i];
    }
  }
  h0.total = static_cast<uint64_t>(std::llround(m0));
  h1.total = static_cast<uint64_t>(std::llround(m1));
  if (m0 > 0.0)
    for (double& c : h0.counts) c /= m0;
  if (m1 > 0.0)
    for (double& c : h1.counts) c /= m1;
  return {std::move(h0), std::move(h1)};
}

JointMoments joint_moments(const std::array<Joint3DHistogram, 3>& hists,
                           const ReadoutCalibration& calib,
                           const MomentTable& noise_h, int max_order,
                           int min_counts) {
  require_matching(hists);
  const GridSpec& g = hists[0].spec;
  const int M = max_order;

  // field marginal pooled over the three bases
  Histogram2D pooled;
  pooled.spec = g;
  pooled.counts.assign(static_cast<size_t>(g.size()), 0.0);
  for (const auto& h : hists) {
    pooled.total += h.total;
    pooled.overflow += h.overflow;
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        double tot = 0.0;
        for (int iq = 0; iq < h.nq(); ++iq) tot += h.at(ix, iy, iq);
        pooled.counts[g.index(ix, iy)] += tot;
      }
  }

  JointMoments jm;
  jm.field = deconvolve(empirical_s_moments(pooled, M), noise_h);

  for (int b = 0; b < 3; ++b) {
    const ConditionedPauli cp = conditioned_pauli(hists[b], calib, min_counts);
    // sigma-weighted amplitude moments: each sample contributes kern * (+-1)
    MomentTable t(M, Ordering::anti_normal_s);
    std::vector<LComplex> sum((M + 1) * (M + 1), LComplex(0, 0));
    std::vector<long double> sum_sq((M + 1) * (M + 1), 0.0L);
    long double denom = 0.0L;
    std::vector<Complex> zp(M + 1), zb(M + 1);
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const size_t i = g.index(ix, iy);
        if (!cp.valid[i]) continue;
        const double mass = cp.c0[i] + cp.c1[i];
        const double signed_mass = cp.value[i] * mass;
        denom += mass;
        const Complex z = g.center(ix, iy);
        zp[0] = zb[0] = Complex(1, 0);
        for (int m = 1; m <= M; ++m) zp[m] = zp[m - 1] * z;
        for (int n = 1; n <= M; ++n) zb[n] = zb[n - 1] * std::conj(z);
        for (int n = 0; n <= M; ++n)
          for (int m = 0; n + m <= M; ++m) {
            const Complex v = zb[n] * zp[m];
            sum[n * (M + 1) + m] +=
                LComplex(signed_mass * v.real(), signed_mass * v.imag());
            sum_sq[n * (M + 1) + m] += mass * std::norm(v);
          }
      }
    }
    require(denom > 0.0L, "no valid bins for the conditioned moments");
    for (int n = 0; n <= M; ++n)
      for (int m = 0; n + m <= M; ++m) {
        const LComplex s = sum[n * (M + 1) + m];
        const Complex mean(static_cast<double>(s.real() / denom),
                           static_cast<double>(s.imag() / denom));
        const double var = std::max(
            static_cast<double>(sum_sq[n * (M + 1) + m] / denom) -
                std::norm(mean),
            0.0);
        t.set(n, m, mean, std::sqrt(var / static_cast<double>(denom)));
      }
    jm.pauli[b] = deconvolve(t, noise_h);
  }
  return jm;
}

namespace {

Matrix pauli_matrix(int i) {
  Matrix p(2, 2);
  if (i == 0)
    p << 0, 1, 1, 0;
  else if (i == 1)
    p << 0, Complex(0, -1), Complex(0, 1), 0;
  else
    p << 1, 0, 0, -1;
  return p;
}

MomentTable lincomb(const MomentTable& a, Complex wa, const MomentTable& b,
                    Complex wb) {
  MomentTable out(a.max_order(), a.tag());
  for (int n = 0; n <= a.max_order(); ++n)
    for (int m = 0; n + m <= a.max_order(); ++m) {
      const Complex v = wa * a.value(n, m) + wb * b.value(n, m);
      const double s =
          std::sqrt(std::norm(wa) * a.sigma(n, m) * a.sigma(n, m) +
                    std::norm(wb) * b.sigma(n, m) * b.sigma(n, m));
      out.set(n, m, v, s);
    }
  return out;
}

}  // namespace

JointDensityMatrix joint_density_from_moments(const JointMoments& jm,
                                              int field_dim, bool polish) {
  const Complex half(0.5, 0.0), ihalf(0.0, 0.5);
  const Matrix r00 =
      moments_to_density(lincomb(jm.field, half, jm.pauli[2], half), field_dim);
  const Matrix r11 = moments_to_density(
      lincomb(jm.field, half, jm.pauli[2], -half), field_dim);
  const Matrix r10 = moments_to_density(
      lincomb(jm.pauli[0], half, jm.pauli[1], ihalf), field_dim);
  JointDensityMatrix out;
  out.field_dim = field_dim;
  out.mat.resize(2 * field_dim, 2 * field_dim);
  out.mat.block(0, 0, field_dim, field_dim) = r00;
  out.mat.block(0, field_dim, field_dim, field_dim) = r10.adjoint();
  out.mat.block(field_dim, 0, field_dim, field_dim) = r10;
  out.mat.block(field_dim, field_dim, field_dim, field_dim) = r11;
  out.mat = 0.5 * (out.mat + out.mat.adjoint()).eval();
  const double tr = out.mat.trace().real();
  if (tr > 0.0) out.mat /= tr;
  if (!polish) return out;

  // PSD-constrained refit against the same four tables, seeded by the blocks.
  std::vector<Matrix> ops;
  std::vector<Complex> targets;
  std::vector<double> sigmas;
  const Matrix a = annihilation(field_dim);
  const Matrix id2 = Matrix::Identity(2, 2);
  const int M = jm.field.max_order();
  for (int n = 0; n <= M; ++n) {
    for (int m = 0; n + m <= M; ++m) {
      Matrix op_f = Matrix::Identity(field_dim, field_dim);
      for (int k = 0; k < n; ++k) op_f = a.adjoint() * op_f;
      for (int k = 0; k < m; ++k) op_f = op_f * a;
      if (n != 0 || m != 0) {  // the identity pair is the trace constraint
        ops.push_back(kron(id2, op_f));
        targets.push_back(jm.field.value(n, m));
        sigmas.push_back(jm.field.sigma(n, m));
      }
      for (int i = 0; i < 3; ++i) {
        ops.push_back(kron(pauli_matrix(i), op_f));
        targets.push_back(jm.pauli[i].value(n, m));
        sigmas.push_back(jm.pauli[i].sigma(n, m));
      }
    }
  }
  auto [rho, rep] =
      mle_from_operators(ops, targets, sigmas, 2 * field_dim, &out.mat);
  (void)rep;
  out.mat = rho.mat();
  return out;
}

PovmSet joint_povm(const PovmSet& field, PauliBasis basis) {
  PovmSet out;
  out.dim = 2 * field.dim;
  const size_t J = field.size();
  out.labels.reserve(2 * J);
  out.weights.reserve(2 * J);
  Eigen::Vector2cd b[2] = {qubit_basis_state(basis, 0),
                           qubit_basis_state(basis, 1)};
  if (field.rank1()) {
    out.probes.resize(static_cast<int>(2 * J), out.dim);
  } else {
    out.ops.reserve(2 * J);
  }
  Matrix proj[2];
  for (int s = 0; s < 2; ++s) proj[s] = b[s] * b[s].adjoint();
  for (size_t j = 0; j < J; ++j) {
    for (int s = 0; s < 2; ++s) {
      out.labels.push_back(field.labels[j]);
      out.weights.push_back(field.weights[j]);
      if (field.rank1()) {
        const int row = static_cast<int>(2 * j + s);
        for (int q = 0; q < 2; ++q)
          out.probes.row(row).segment(q * field.dim, field.dim) =
              b[s](q) * field.probes.row(static_cast<int>(j));
      } else {
        out.ops.push_back(kron(proj[s], field.ops[j]));
      }
    }
  }
  Matrix id2 = Matrix::Identity(2, 2);
  out.g = kron(id2, field.g);
  out.g_pinv = kron(id2, psd_pseudo_inverse(field.g));
  return out;
}

std::pair<JointDensityMatrix, LikelihoodReport> joint_mle(
    const std::array<Joint3DHistogram, 3>& hists,
    const ReadoutCalibration& calib, const DensityMatrix& rho_h,
    int field_dim, double tol, int max_iter) {
  require_matching(hists);
  const GridSpec& g = hists[0].spec;
  const PovmSet field = povm_noisy(rho_h, g, field_dim);

  PovmSet all;
  all.dim = 2 * field_dim;
  std::vector<double> counts;
  all.g = Matrix::Zero(all.dim, all.dim);
  for (int b = 0; b < 3; ++b) {
    PovmSet one = joint_povm(field, kBases[b]);
    const ConditionedPauli cp = conditioned_pauli(hists[b], calib);
    double tot = 0.0;
    for (size_t i = 0; i < cp.c0.size(); ++i)
      if (cp.valid[i]) tot += cp.c0[i] + cp.c1[i];
    require(tot > 0.0, "no valid bins in a basis histogram");
    // POVM element order is (bin, s); bins run x fastest like spec.index
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const size_t i = g.index(ix, iy);
        counts.push_back(cp.valid[i] ? cp.c0[i] / tot : 0.0);
        counts.push_back(cp.valid[i] ? cp.c1[i] / tot : 0.0);
      }
    all.g += one.g;
    all.labels.insert(all.labels.end(), one.labels.begin(), one.labels.end());
    all.weights.insert(all.weights.end(), one.weights.begin(),
                       one.weights.end());
    for (auto& op : one.ops) all.ops.push_back(std::move(op));
  }
  all.g_pinv = psd_pseudo_inverse(all.g);

  const DensityMatrix mixed(
      Matrix::Identity(all.dim, all.dim) / double(all.dim));
  auto [rho, rep] = iterate_rhor(mixed, all, counts, tol, max_iter);
  JointDensityMatrix out;
  out.field_dim = field_dim;
  out.mat = rho.mat();
  return {std::move(out), rep};
}

}  // namespace qtomo
