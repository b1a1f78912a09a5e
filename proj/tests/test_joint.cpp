#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qtomo/joint.hpp"
#include "qtomo/rng.hpp"
#include "qtomo/simulate.hpp"

using namespace qtomo;

namespace {

// gaussian bin masses on shared edges, normalized
std::vector<double> gaussian_bins(const std::vector<double>& edges, double mu,
                                  double sigma) {
  std::vector<double> p(edges.size() - 1);
  double tot = 0.0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const double c = 0.5 * (edges[i] + edges[i + 1]);
    p[i] = std::exp(-0.5 * (c - mu) * (c - mu) / (sigma * sigma));
    tot += p[i];
  }
  for (double& v : p) v /= tot;
  return p;
}

struct JointSetup {
  std::array<Joint3DHistogram, 3> hists;
  ReadoutCalibration cal;
};

JointSetup simulate_bell(int field_dim, double n0, size_t n, uint64_t seed,
                         const GridSpec& grid, int nq, double q_lim) {
  const JointDensityMatrix bell = bell_joint_state(field_dim);
  const NoiseModel noise = NoiseModel::thermal_noise(n0);
  const ReadoutModel readout{-1.5, 1.0, 1.5, 1.0};  // 3 sigma separation
  JointSetup out;
  const PauliBasis bases[3] = {PauliBasis::x, PauliBasis::y, PauliBasis::z};
  for (int b = 0; b < 3; ++b) {
    const auto s = sample_joint(bell, bases[b], noise, readout, n,
                                derive_seed(seed, b));
    out.hists[b] = joint_histogram(s, bases[b], grid, nq, -q_lim, q_lim);
  }
  const auto q0 = sample_qubit_readout(0, readout, n / 2, derive_seed(seed, 7));
  const auto q1 = sample_qubit_readout(1, readout, n / 2, derive_seed(seed, 8));
  out.cal = calibrate_readout(q0, q1, nq, -q_lim, q_lim);
  return out;
}

}  // namespace

TEST_CASE("readout calibration") {
  const ReadoutModel m{-2.0, 0.5, 2.0, 0.5};
  const auto q0 = sample_qubit_readout(0, m, 40000, 1);
  const auto q1 = sample_qubit_readout(1, m, 40000, 2);
  const ReadoutCalibration cal = calibrate_readout(q0, q1, 40, -5.0, 5.0);
  cal.validate();
  CHECK(cal.nq() == 40);
  CHECK(cal.edges.size() == 41u);
  CHECK(cal.overlap() < 0.01);  // 4 sigma tails overlap barely

  const ReadoutModel close{-0.1, 1.0, 0.1, 1.0};
  const ReadoutCalibration cal2 =
      calibrate_readout(sample_qubit_readout(0, close, 40000, 3),
                        sample_qubit_readout(1, close, 40000, 4), 40, -5, 5);
  CHECK(cal2.overlap() > 0.9);
}

TEST_CASE("branch mass fit on synthetic traces") {
  ReadoutCalibration cal;
  const int nq = 30;
  cal.edges.resize(nq + 1);
  for (int i = 0; i <= nq; ++i) cal.edges[i] = -6.0 + 12.0 * i / nq;
  cal.p0 = gaussian_bins(cal.edges, -1.5, 1.0);
  cal.p1 = gaussian_bins(cal.edges, 1.5, 1.0);
  cal.validate();

  Joint3DHistogram h;
  h.basis = PauliBasis::z;
  h.spec = GridSpec{0.0, 1.0, 0.0, 1.0, 1, 1};
  h.q_edges = cal.edges;
  h.counts.assign(nq, 0.0);
  const double c0 = 30.0, c1 = 70.0;
  for (int iq = 0; iq < nq; ++iq)
    h.at(0, 0, iq) = c0 * cal.p0[iq] + c1 * cal.p1[iq];
  h.total = 100;

  const ConditionedPauli cp = conditioned_pauli(h, cal, 10);
  REQUIRE(cp.valid[0] == 1);
  CHECK(cp.c0[0] == doctest::Approx(c0).epsilon(1e-9));
  CHECK(cp.c1[0] == doctest::Approx(c1).epsilon(1e-9));
  CHECK(cp.value[0] == doctest::Approx(-0.4).epsilon(1e-9));

  // below the count threshold the bin is flagged invalid
  const ConditionedPauli sparse = conditioned_pauli(h, cal, 200);
  CHECK(sparse.valid[0] == 0);

  // a trace that is pure branch 1 fits to c0 = 0 and <sigma> = -1
  for (int iq = 0; iq < nq; ++iq) h.at(0, 0, iq) = 50.0 * cal.p1[iq];
  const ConditionedPauli pure1 = conditioned_pauli(h, cal, 10);
  CHECK(pure1.value[0] == doctest::Approx(-1.0));
}

TEST_CASE("joint histogram binning") {
  const GridSpec g{-1.0, 1.0, -1.0, 1.0, 2, 2};
  std::vector<JointSample> s = {
      {{-0.5, -0.5}, -1.0},  // cell (0,0), q bin 0
      {{0.5, 0.5}, 1.0},     // cell (1,1), q bin 1
      {{0.5, 0.5}, 5.0},     // q overflow
      {{2.0, 0.0}, 0.0},     // grid overflow
  };
  const Joint3DHistogram h =
      joint_histogram(s, PauliBasis::y, g, 2, -2.0, 2.0);
  CHECK(h.basis == PauliBasis::y);
  CHECK(h.total == 4);
  CHECK(h.overflow == 2);
  CHECK(h.at(0, 0, 0) == 1.0);
  CHECK(h.at(1, 1, 1) == 1.0);
  CHECK(h.nq() == 2);
}

TEST_CASE("conditioned histograms split the field mass") {
  const GridSpec g{-1.0, 1.0, -1.0, 1.0, 1, 1};
  ReadoutCalibration cal;
  cal.edges = {-3.0, 0.0, 3.0};
  cal.p0 = {0.9, 0.1};
  cal.p1 = {0.1, 0.9};
  Joint3DHistogram h;
  h.basis = PauliBasis::z;
  h.spec = g;
  h.q_edges = cal.edges;
  h.counts = {36.0, 4.0};  // 40 counts, all branch 0
  h.total = 40;
  const ConditionedPauli cp = conditioned_pauli(h, cal, 1);
  auto [h0, h1] = conditioned_histograms(h, cp);
  CHECK(h0.counts[0] == doctest::Approx(1.0));  // normalized
  CHECK(h0.total == 40);
  CHECK(h1.total == 0);
}

TEST_CASE("joint moments of the bell state") {
  const GridSpec grid = GridSpec::square(4.5, 36);
  const JointSetup js = simulate_bell(3, 0.4, 300000, 100, grid, 36, 6.0);
  const MomentTable noise_h = thermal_noise_table(0.4, 4);
  const JointMoments jm = joint_moments(js.hists, js.cal, noise_h, 4, 5);

  // field marginal of the bell state: <a†a> = 1/2, <a> = 0
  CHECK(std::abs(jm.field.value(1, 1) - Complex(0.5, 0)) < 0.02);
  CHECK(std::abs(jm.field.value(0, 1)) < 0.02);
  // <sigma_z> = 0, <a†a sigma_z> = -1/2, <a sigma_x> = +1/2; the sigma_y
  // moment comes from the exact state so the phase convention stays pinned
  const JointDensityMatrix bell = bell_joint_state(3);
  CHECK(std::abs(jm.pauli[2].value(0, 0)) < 0.02);
  CHECK(std::abs(jm.pauli[2].value(1, 1) - Complex(-0.5, 0)) < 0.03);
  CHECK(std::abs(jm.pauli[0].value(0, 1) - Complex(0.5, 0)) < 0.03);
  CHECK(std::abs(jm.pauli[1].value(0, 1) -
                 joint_pauli_moment(bell, PauliBasis::y, 0, 1)) < 0.03);

  const JointDensityMatrix rho = joint_density_from_moments(jm, 3);
  CHECK(rho.mat.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(joint_fidelity(rho, bell_joint_vector(3)) > 0.9);
}

TEST_CASE("joint povm tensors the field elements with qubit projectors") {
  const PovmSet field = povm_ideal(GridSpec::square(3.0, 6), 3);
  const PovmSet jp = joint_povm(field, PauliBasis::x);
  REQUIRE(jp.size() == 2 * field.size());
  CHECK(jp.dim == 6);

  for (size_t j : {size_t(0), size_t(17), size_t(35)}) {
    for (int s = 0; s < 2; ++s) {
      const Eigen::Vector2cd q = qubit_basis_state(PauliBasis::x, s);
      const Matrix proj = q * q.adjoint();
      const Matrix want = kron(proj, field.op(j));
      const Matrix got = jp.op(2 * j + s);
      CHECK((want - got).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(jp.weights[2 * j + s] == field.weights[j]);
    }
  }
}

TEST_CASE("joint mle recovers the bell state") {
  const GridSpec grid = GridSpec::square(4.5, 28);
  const JointSetup js = simulate_bell(2, 0.4, 200000, 200, grid, 30, 6.0);
  const DensityMatrix rho_h = thermal(0.4, 12);
  auto [rho, rep] = joint_mle(js.hists, js.cal, rho_h, 2, 1e-9, 250);
  CHECK(rep.monotone);
  CHECK(rho.mat.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(joint_fidelity(rho, bell_joint_vector(2)) > 0.9);
  CHECK(joint_pauli_moment(rho, PauliBasis::z, 1, 1).real() ==
        doctest::Approx(-0.5).epsilon(0.15));
}
