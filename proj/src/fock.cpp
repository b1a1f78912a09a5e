#include "qtomo/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace qtomo {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix m) : mat_(std::move(m)) {
  require(mat_.rows() == mat_.cols() && mat_.rows() > 0,
          "density matrix must be square and nonempty");
  const double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  require(herm <= 1e-10, "density matrix not Hermitian");
  require(std::abs(mat_.trace() - Complex(1.0, 0.0)) <= 1e-10,
          "density matrix trace must be 1");
}

DensityMatrix DensityMatrix::pure(const FockVector& psi) {
  require(psi.dim() > 0, "empty state vector");
  Vector v = psi.amps / psi.amps.norm();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::project(Matrix m) {
  require(m.rows() == m.cols() && m.rows() > 0, "matrix must be square");
  Matrix h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  require(std::abs(tr) > 1e-300, "matrix trace vanishes");
  return DensityMatrix(h / tr);
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix annihilation(int dim) {
  require(dim >= 1, "dim must be >= 1");
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

FockVector fock_state(int n, int dim) {
  require(n >= 0 && n < dim, "Fock index out of range");
  Vector v = Vector::Zero(dim);
  v(n) = 1.0;
  return {v};
}

Vector coherent_amplitudes(Complex alpha, int dim) {
  require(dim >= 1, "dim must be >= 1");
  Vector v(dim);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(double(n + 1));
  }
  return v;
}

FockVector coherent(Complex alpha, int dim) {
  Vector v = coherent_amplitudes(alpha, dim);
  return {v / v.norm()};
}

Matrix displacement(Complex alpha, int dim) {
  // generator alpha a† - conj(alpha) a is anti-Hermitian: exponentiate as
  // exp(iH) with H Hermitian.
  Matrix a = annihilation(dim);
  Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  Matrix h = Complex(0, -1) * gen;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(dim);
  for (int k = 0; k < dim; ++k)
    phases(k) = std::exp(Complex(0, es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

DensityMatrix thermal(double n0, int dim) {
  require(n0 >= 0.0, "thermal occupation must be >= 0");
  require(dim >= 1, "dim must be >= 1");
  Eigen::VectorXd p(dim);
  const double r = n0 / (n0 + 1.0);
  double w = 1.0;
  for (int n = 0; n < dim; ++n) {
    p(n) = w;
    w *= r;
  }
  p /= p.sum();
  Matrix m = Matrix::Zero(dim, dim);
  m.diagonal() = p.cast<Complex>();
  return DensityMatrix(std::move(m));
}

namespace {

Complex ordered_moment(const DensityMatrix& rho, int n_create, int m_destroy,
                       bool normal) {
  const int d = rho.dim();
  if (n_create < 0 || m_destroy < 0)
    throw std::invalid_argument("moment orders must be >= 0");
  // Normal order is exact at any order: (a†)^n a^m = (a^n)† a^m and lowering
  // never leaves the truncated space. Raising does, so anti-normal products
  // are only trustworthy when the order stays below the truncation.
  if (!normal && n_create + m_destroy >= d)
    throw std::out_of_range("moment order exceeds truncation");
  Matrix a = annihilation(d);
  Matrix op = Matrix::Identity(d, d);
  if (normal) {
    for (int k = 0; k < n_create; ++k) op = a.adjoint() * op;
    for (int k = 0; k < m_destroy; ++k) op = op * a;
  } else {
    for (int k = 0; k < m_destroy; ++k) op = a * op;
    for (int k = 0; k < n_create; ++k) op = op * a.adjoint();
  }
  return (rho.mat() * op).trace();
}

}  // namespace

Complex normally_ordered_moment(const DensityMatrix& rho, int n, int m) {
  return ordered_moment(rho, n, m, true);
}

Complex anti_normal_moment(const DensityMatrix& rho, int p, int q) {
  // <a^p (a†)^q>
  return ordered_moment(rho, q, p, false);
}

double fidelity(const DensityMatrix& rho, const FockVector& psi) {
  require(rho.dim() == psi.dim(), "dimension mismatch");
  Vector v = psi.amps / psi.amps.norm();
  const Complex f = v.adjoint() * rho.mat() * v;
  return std::max(0.0, f.real());
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), "dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat() - sigma.mat(),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double mean_photon(const DensityMatrix& rho) {
  double n = 0.0;
  for (int k = 1; k < rho.dim(); ++k) n += k * rho(k, k).real();
  return n;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::Vector2cd qubit_basis_state(PauliBasis basis, int s) {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Vector2cd v;
  switch (basis) {
    case PauliBasis::x:
      v << r, (s == 0 ? r : -r);
      break;
    case PauliBasis::y:
      v << r, (s == 0 ? Complex(0, r) : Complex(0, -r));
      break;
    case PauliBasis::z:
      v << (s == 0 ? 1.0 : 0.0), (s == 0 ? 0.0 : 1.0);
      break;
  }
  return v;
}

Matrix conditioned_field_block(const JointDensityMatrix& rho, PauliBasis basis,
                               int s) {
  const int d = rho.field_dim;
  Eigen::Vector2cd q = qubit_basis_state(basis, s);
  Matrix block = Matrix::Zero(d, d);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      block += std::conj(q(i)) * q(j) * rho.mat.block(i * d, j * d, d, d);
  return block;
}

Vector bell_joint_vector(int field_dim) {
  if (field_dim < 2) throw std::invalid_argument("field dim must be >= 2");
  Vector v = Vector::Zero(2 * field_dim);
  const double r = 1.0 / std::sqrt(2.0);
  v(0) = r;              // |0_z>|0>
  v(field_dim + 1) = r;  // |1_z>|1>
  return v;
}

JointDensityMatrix bell_joint_state(int field_dim) {
  Vector v = bell_joint_vector(field_dim);
  return {field_dim, v * v.adjoint()};
}

double joint_fidelity(const JointDensityMatrix& rho, const Vector& psi) {
  require(rho.dim() == psi.size(), "dimension mismatch");
  Vector v = psi / psi.norm();
  const Complex f = v.adjoint() * rho.mat * v;
  return std::max(0.0, f.real());
}

Complex joint_pauli_moment(const JointDensityMatrix& rho, PauliBasis basis,
                           int n, int m) {
  // Normal ordering lowers before raising, so the truncated product is exact
  // for support inside the cutoff at any order.
  const int d = rho.field_dim;
  Matrix pauli(2, 2);
  switch (basis) {
    case PauliBasis::x:
      pauli << 0, 1, 1, 0;
      break;
    case PauliBasis::y:
      pauli << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case PauliBasis::z:
      pauli << 1, 0, 0, -1;
      break;
  }
  Matrix a = annihilation(d);
  Matrix op = Matrix::Identity(d, d);
  for (int k = 0; k < n; ++k) op = a.adjoint() * op;
  for (int k = 0; k < m; ++k) op = op * a;
  return (rho.mat * kron(pauli, op)).trace();
}

DensityMatrix field_marginal(const JointDensityMatrix& rho) {
  const int d = rho.field_dim;
  Matrix m = rho.mat.block(0, 0, d, d) + rho.mat.block(d, d, d, d);
  return DensityMatrix(std::move(m));
}

}  // namespace qtomo
