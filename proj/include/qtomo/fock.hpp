#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qtomo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Pure state in the truncated number basis. Normalized on construction paths
// that promise it; use norm() to check.
struct FockVector {
  Vector amps;

  int dim() const { return static_cast<int>(amps.size()); }
  double norm() const { return amps.norm(); }
};

// Hermitian, unit-trace matrix in the truncated number basis.
// Hermiticity (inf-norm defect <= 1e-10) and trace (|tr-1| <= 1e-10) are
// enforced at construction; positivity is checked on demand because several
// estimators legitimately produce small negative eigenvalues.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Matrix m);

  static DensityMatrix pure(const FockVector& psi);
  // Hermitizes and renormalizes the trace before validating. For estimator
  // output where roundoff-level defects are expected.
  static DensityMatrix project(Matrix m);

  const Matrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  Complex operator()(int m, int n) const { return mat_(m, n); }
  double min_eigenvalue() const;

 private:
  Matrix mat_;
};

// a in the truncated basis: <n-1|a|n> = sqrt(n). The top state annihilates
// one step early; callers must keep support below the cutoff.
Matrix annihilation(int dim);

FockVector fock_state(int n, int dim);

// Truncated coherent state, renormalized to unit norm.
FockVector coherent(Complex alpha, int dim);

// Raw truncated amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!), not
// renormalized. These are the exact infinite-dimensional amplitudes, which is
// what sampling and POVM kernels need.
Vector coherent_amplitudes(Complex alpha, int dim);

// exp(alpha a† - conj(alpha) a) via Hermitian eigendecomposition of the
// generator. Unitary to machine precision at any dim; columns are accurate
// only where the truncation is adequate.
Matrix displacement(Complex alpha, int dim);

// Thermal state with mean photon number n0, diagonal renormalized after
// truncation so the trace is exactly 1.
DensityMatrix thermal(double n0, int dim);

// <(a†)^n a^m>. Exact at every order for a state supported inside the
// truncation; lowering operators never leave the space.
Complex normally_ordered_moment(const DensityMatrix& rho, int n, int m);

// <a^p (a†)^q>. Raising can cross the truncation edge, so this throws
// std::out_of_range when p + q >= dim.
Complex anti_normal_moment(const DensityMatrix& rho, int p, int q);

// <psi|rho|psi> for a pure target.
double fidelity(const DensityMatrix& rho, const FockVector& psi);

// (1/2)||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

double mean_photon(const DensityMatrix& rho);

Matrix kron(const Matrix& a, const Matrix& b);

// ---- qubit ⊗ field states ----------------------------------------------

// Qubit-first ordering: basis index s*field_dim + n for |s>|n>.
struct JointDensityMatrix {
  int field_dim = 0;
  Matrix mat;

  int dim() const { return 2 * field_dim; }
};

enum class PauliBasis { x, y, z };

// Eigenvector of sigma_i with eigenvalue +1 (s = 0) or -1 (s = 1).
Eigen::Vector2cd qubit_basis_state(PauliBasis basis, int s);

// <s_i| rho |s_i> block on the field space (unnormalized; its trace is the
// outcome probability).
Matrix conditioned_field_block(const JointDensityMatrix& rho, PauliBasis basis,
                               int s);

// (|0_z>|0> + |1_z>|1>)/sqrt(2) embedded at the given field dim.
JointDensityMatrix bell_joint_state(int field_dim);

Vector bell_joint_vector(int field_dim);

double joint_fidelity(const JointDensityMatrix& rho, const Vector& psi);

// <(a†)^n a^m sigma_i> for an explicit joint state.
Complex joint_pauli_moment(const JointDensityMatrix& rho, PauliBasis basis,
                           int n, int m);

// Field marginal tr_qubit(rho).
DensityMatrix field_marginal(const JointDensityMatrix& rho);

}  // namespace qtomo
