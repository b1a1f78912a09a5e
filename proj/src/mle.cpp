#include "qtomo/mle.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <stdexcept>

#include "qtomo/rng.hpp"

namespace qtomo {

namespace {

constexpr double kProbFloor = 1e-300;

void finish_povm(PovmSet& p) {
  p.g_pinv = psd_pseudo_inverse(p.g);
}

// Exact <m|D(alpha)|n> block, rows m < n_rows, cols n < n_cols. Column
// recurrence: col_{n+1}[m] = (sqrt(m) col_n[m-1] - conj(alpha) col_n[m]) /
// sqrt(n+1); rows never couple upward, so the block is free of truncation
// error.
Matrix displaced_fock_block(Complex alpha, int n_rows, int n_cols) {
  Matrix w(n_rows, n_cols);
  Vector col(n_rows);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (int m = 0; m < n_rows; ++m) {
    col(m) = c;
    c *= alpha / std::sqrt(m + 1.0);
  }
  w.col(0) = col;
  for (int n = 1; n < n_cols; ++n) {
    Vector next(n_rows);
    for (int m = 0; m < n_rows; ++m) {
      Complex v = -std::conj(alpha) * col(m);
      if (m > 0) v += std::sqrt(static_cast<double>(m)) * col(m - 1);
      next(m) = v / std::sqrt(static_cast<double>(n));
    }
    col.swap(next);
    w.col(n) = col;
  }
  return w;
}

struct Probs {
  std::vector<double> p;
  double log_likelihood = 0.0;
  int regularized = 0;
};

// P_j = w_j Tr[rho op_j], plus sum_j c_j log P_j over bins with data.
Probs model_probs(const PovmSet& povm, const Matrix& emat, const Matrix& rho,
                  const std::vector<double>& counts) {
  const size_t J = povm.size();
  Probs out;
  out.p.resize(J);
  if (povm.rank1()) {
    // Row j of probes holds v_j^T, so v_j^dag rho v_j is the plain product of
    // (conj(probes) * rho).row(j) with probes.row(j).
    const Matrix m1 = povm.probes.conjugate() * rho;
    for (size_t j = 0; j < J; ++j) {
      const int r = static_cast<int>(j);
      const Complex dot = m1.row(r).cwiseProduct(povm.probes.row(r)).sum();
      out.p[j] = povm.weights[j] * dot.real() / M_PI;
    }
  } else {
    const Matrix rt = rho.transpose();
    const Eigen::Map<const Vector> vrho(rt.data(), rt.size());
    const Vector pv = emat * vrho;
    for (size_t j = 0; j < J; ++j)
      out.p[j] = povm.weights[j] * pv(static_cast<int>(j)).real();
  }
  long double ll = 0.0L;
  for (size_t j = 0; j < J; ++j) {
    if (counts[j] <= 0.0) continue;
    double pj = out.p[j];
    if (pj < kProbFloor) {
      pj = kProbFloor;
      ++out.regularized;
    }
    ll += counts[j] * std::log(pj);
  }
  out.log_likelihood = static_cast<double>(ll);
  return out;
}

// R = sum_j coef_j op_j with coef_j = w_j c_j / P_j.
Matrix r_operator(const PovmSet& povm, const Matrix& emat,
                  const std::vector<double>& counts, const Probs& pr) {
  const size_t J = povm.size();
  Vector coef(J);
  for (size_t j = 0; j < J; ++j) {
    const double pj = std::max(pr.p[j], kProbFloor);
    coef(static_cast<int>(j)) =
        counts[j] > 0.0 ? povm.weights[j] * counts[j] / pj : 0.0;
  }
  if (povm.rank1()) {
    return (povm.probes.transpose() * (coef / M_PI).asDiagonal() *
            povm.probes.conjugate());
  }
  const Vector vr = emat.transpose() * coef;
  const int d = povm.dim;
  Matrix r(d, d);
  // emat row j stores op_j at slot b + a*d as op_j(b, a), so slot a + b*d
  // carries the (a, b) entry of the weighted sum.
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) r(a, b) = vr(a + b * d);
  return r;
}

}  // namespace

Matrix psd_pseudo_inverse(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  const double cut = 1e-6 * es.eigenvalues().maxCoeff();
  Vector inv = Vector::Zero(g.rows());
  for (int i = 0; i < g.rows(); ++i)
    if (es.eigenvalues()(i) > cut) inv(i) = 1.0 / es.eigenvalues()(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix PovmSet::op(size_t j) const {
  if (rank1()) {
    const Vector v = probes.row(static_cast<int>(j)).transpose();
    return v * v.adjoint() / M_PI;
  }
  return ops[j];
}

PovmSet povm_ideal(const GridSpec& spec, int dim) {
  spec.validate();
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  PovmSet p;
  p.dim = dim;
  const size_t J = static_cast<size_t>(spec.size());
  p.labels.reserve(J);
  p.weights.assign(J, spec.cell_area());
  p.probes.resize(static_cast<int>(J), dim);
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      const Complex alpha = spec.center(ix, iy);
      p.labels.push_back(alpha);
      p.probes.row(static_cast<int>(p.labels.size()) - 1) =
          coherent_amplitudes(alpha, dim).transpose();
    }
  }
  p.g = p.probes.transpose() *
        (Eigen::Map<const Eigen::VectorXd>(p.weights.data(), p.weights.size()) /
         M_PI)
            .asDiagonal() *
        p.probes.conjugate();
  finish_povm(p);
  return p;
}

PovmSet povm_noisy(const DensityMatrix& rho_h, const GridSpec& spec, int dim) {
  spec.validate();
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  PovmSet p;
  p.dim = dim;
  const size_t J = static_cast<size_t>(spec.size());
  p.labels.reserve(J);
  p.weights.assign(J, spec.cell_area());
  p.ops.reserve(J);
  p.g = Matrix::Zero(dim, dim);
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      const Complex alpha = spec.center(ix, iy);
      p.labels.push_back(alpha);
      const Matrix w = displaced_fock_block(alpha, dim, rho_h.dim());
      Matrix op = w * rho_h.mat() * w.adjoint() / M_PI;
      p.g += spec.cell_area() * op;
      p.ops.push_back(std::move(op));
    }
  }
  finish_povm(p);
  return p;
}

std::vector<double> frequencies(const Histogram2D& hist) {
  const double w = hist.in_range();
  if (!(w > 0.0)) throw std::invalid_argument("histogram has no in-range data");
  std::vector<double> f(hist.counts.size());
  for (size_t i = 0; i < f.size(); ++i) f[i] = hist.counts[i] / w;
  return f;
}

std::pair<DensityMatrix, LikelihoodReport> iterate_rhor(
    const DensityMatrix& initial, const PovmSet& povm,
    const std::vector<double>& counts, double tol, int max_iter) {
  if (initial.dim() != povm.dim)
    throw std::invalid_argument("state and POVM dimensions differ");
  if (counts.size() != povm.size())
    throw std::invalid_argument("counts misaligned with POVM");
  const int d = povm.dim;

  Matrix emat;
  if (!povm.rank1()) {
    emat.resize(static_cast<int>(povm.size()), d * d);
    for (size_t j = 0; j < povm.size(); ++j) {
      const Matrix& e = povm.ops[j];
      // column-major flatten of op^T so that emat * vec(rho^T) = Tr[rho op]
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          emat(static_cast<int>(j), b + a * d) = e(b, a);
    }
  }

  Matrix rho = initial.mat();
  Probs pr = model_probs(povm, emat, rho, counts);
  LikelihoodReport rep;
  rep.engine = "rhor";
  rep.final_log_likelihood = pr.log_likelihood;

  const Matrix id = Matrix::Identity(d, d);
  for (int it = 0; it < max_iter; ++it) {
    const Matrix r = r_operator(povm, emat, counts, pr);
    const Matrix step = povm.g_pinv * r;
    double lambda = 1.0;
    Matrix cand;
    Probs cand_pr;
    bool accepted = false;
    while (lambda > 1e-4) {
      const Matrix a = lambda == 1.0 ? step : Matrix((1.0 - lambda) * id + lambda * step);
      cand = a * rho * a.adjoint();
      const double tr = cand.trace().real();
      if (tr > 0.0) {
        cand /= tr;
        cand = Matrix(0.5 * (cand + cand.adjoint()));
        cand_pr = model_probs(povm, emat, cand, counts);
        if (cand_pr.log_likelihood >= pr.log_likelihood) {
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // even the most diluted step loses likelihood: treat as stationary
      rep.converged = true;
      rep.delta_last = 0.0;
      break;
    }
    ++rep.iterations;
    rep.delta_last = cand_pr.log_likelihood - pr.log_likelihood;
    rep.stationary_gap = (cand - rho).cwiseAbs().maxCoeff();
    if (cand_pr.log_likelihood < pr.log_likelihood -
                                     1e-9 * (std::abs(pr.log_likelihood) + 1.0))
      rep.monotone = false;
    rho = cand;
    pr = cand_pr;
    rep.final_log_likelihood = pr.log_likelihood;
    rep.regularized_bins = pr.regularized;
    if (std::abs(rep.delta_last) <
        tol * (std::abs(pr.log_likelihood) + 1.0)) {
      rep.converged = true;
      break;
    }
  }
  return {DensityMatrix::project(rho), rep};
}

std::pair<DensityMatrix, LikelihoodReport> reconstruct_noise_state(
    const Histogram2D& reference, int dim, double tol, int max_iter) {
  const GridSpec& g = reference.spec;
  Histogram2D flipped;
  flipped.spec = GridSpec{-g.x_max, -g.x_min, -g.y_max, -g.y_min, g.nx, g.ny};
  flipped.counts.assign(reference.counts.size(), 0.0);
  flipped.total = reference.total;
  flipped.overflow = reference.overflow;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      flipped.counts[flipped.spec.index(g.nx - 1 - ix, g.ny - 1 - iy)] =
          reference.counts[g.index(ix, iy)];

  if (dim <= 0) {
    const double w = reference.in_range();
    if (!(w > 0.0))
      throw std::invalid_argument("reference histogram has no data");
    double e2 = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix)
        e2 += reference.counts[g.index(ix, iy)] * std::norm(g.center(ix, iy));
    const double n0_est = std::max(e2 / w - 1.0, 0.0);
    dim = static_cast<int>(std::ceil(10.0 * n0_est)) + 6;
  }

  const PovmSet povm = povm_ideal(flipped.spec, dim);
  const DensityMatrix mixed(Matrix::Identity(dim, dim) / double(dim));
  return iterate_rhor(mixed, povm, frequencies(flipped), tol, max_iter);
}

namespace {

struct MomentFitProblem {
  int dim = 0;
  std::vector<Matrix> ops;      // (a†)^n a^m
  std::vector<Complex> target;
  std::vector<double> weight;

  int n_params() const { return dim * (dim + 1); }

  Matrix unpack(const gsl_vector* x) const {
    Matrix c = Matrix::Zero(dim, dim);
    int k = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j <= i; ++j) {
        c(i, j) = Complex(gsl_vector_get(x, k), gsl_vector_get(x, k + 1));
        k += 2;
      }
    return c;
  }

  void pack(const Matrix& c, gsl_vector* x) const {
    int k = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j <= i; ++j) {
        gsl_vector_set(x, k, c(i, j).real());
        gsl_vector_set(x, k + 1, c(i, j).imag());
        k += 2;
      }
  }

  // loss and gradient wrt the packed parameters; gradient of the loss in C
  // is -(2/t) (B - Tr[rho B]) C restricted to the lower triangle, with
  // B = sum_k w_k (conj(r_k) E_k + r_k E_k†), r_k the residual.
  double eval(const gsl_vector* x, gsl_vector* grad) const {
    const Matrix c = unpack(x);
    const double t = c.squaredNorm();
    if (!(t > 0.0)) {
      if (grad) gsl_vector_set_all(grad, 0.0);
      return 1e30;
    }
    const Matrix rho = c * c.adjoint() / t;
    double loss = 0.0;
    Matrix b = Matrix::Zero(dim, dim);
    for (size_t k = 0; k < ops.size(); ++k) {
      const Complex f = (rho * ops[k]).trace();
      const Complex r = target[k] - f;
      loss += weight[k] * std::norm(r);
      if (grad)
        b += weight[k] * (std::conj(r) * ops[k] + r * ops[k].adjoint());
    }
    if (grad) {
      const double bb = (rho * b).trace().real();
      const Matrix d = (b - bb * Matrix::Identity(dim, dim)) * c;
      int k = 0;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) {
          gsl_vector_set(grad, k, -2.0 / t * d(i, j).real());
          gsl_vector_set(grad, k + 1, -2.0 / t * d(i, j).imag());
          k += 2;
        }
    }
    return loss;
  }
};

double fit_f(const gsl_vector* x, void* p) {
  return static_cast<MomentFitProblem*>(p)->eval(x, nullptr);
}

void fit_df(const gsl_vector* x, void* p, gsl_vector* g) {
  static_cast<MomentFitProblem*>(p)->eval(x, g);
}

void fit_fdf(const gsl_vector* x, void* p, double* f, gsl_vector* g) {
  *f = static_cast<MomentFitProblem*>(p)->eval(x, g);
}

struct FitOutcome {
  Matrix c;
  double loss = 1e300;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

FitOutcome run_bfgs(MomentFitProblem& prob, const Matrix& c0) {
  static const int once = [] {
    gsl_set_error_handler_off();
    return 0;
  }();
  (void)once;

  gsl_multimin_function_fdf fdf;
  fdf.n = static_cast<size_t>(prob.n_params());
  fdf.f = fit_f;
  fdf.df = fit_df;
  fdf.fdf = fit_fdf;
  fdf.params = &prob;

  gsl_vector* x = gsl_vector_alloc(fdf.n);
  prob.pack(c0, x);
  gsl_multimin_fdfminimizer* mz = gsl_multimin_fdfminimizer_alloc(
      gsl_multimin_fdfminimizer_vector_bfgs2, fdf.n);
  double step = 0.1;
  gsl_multimin_fdfminimizer_set(mz, &fdf, x, step, 0.1);

  FitOutcome out;
  int stalls = 0;
  for (int it = 0; it < 20000; ++it) {
    const int status = gsl_multimin_fdfminimizer_iterate(mz);
    ++out.iterations;
    if (gsl_multimin_test_gradient(mz->gradient, 1e-9) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
    if (status) {
      // Line search exhausted. bfgs2 often quits while the gradient is still
      // large; re-seeding at the current point with a shorter step recovers.
      if (++stalls > 12) break;
      gsl_vector_memcpy(x, mz->x);
      step = std::max(0.25 * step, 1e-6);
      gsl_multimin_fdfminimizer_set(mz, &fdf, x, step, 0.1);
    }
  }
  out.c = prob.unpack(mz->x);
  out.loss = mz->f;
  out.grad_norm = gsl_blas_dnrm2(mz->gradient);
  gsl_multimin_fdfminimizer_free(mz);
  gsl_vector_free(x);
  return out;
}

}  // namespace

std::pair<DensityMatrix, LikelihoodReport> mle_from_operators(
    const std::vector<Matrix>& ops, const std::vector<Complex>& targets,
    const std::vector<double>& sigmas, int dim, const Matrix* init) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (ops.size() != targets.size() || ops.size() != sigmas.size())
    throw std::invalid_argument("operator fit inputs differ in length");
  if (ops.empty()) throw std::invalid_argument("operator fit needs targets");

  MomentFitProblem prob;
  prob.dim = dim;
  prob.ops = ops;
  prob.target = targets;
  double wmax = 0.0;
  for (double s : sigmas) {
    const double sc = std::max(s, 1e-8);
    prob.weight.push_back(1.0 / (sc * sc));
    wmax = std::max(wmax, prob.weight.back());
  }
  for (double& w : prob.weight) w /= wmax;

  Matrix start = Matrix::Identity(dim, dim) / std::sqrt(double(dim));
  if (init) {
    // Lower-triangular factor of the (ridged) starting guess.
    const Matrix g =
        DensityMatrix::project(*init).mat() + 1e-8 * Matrix::Identity(dim, dim);
    start = Eigen::LLT<Matrix>(g).matrixL();
  }
  FitOutcome best;
  for (int restart = 0; restart < 4; ++restart) {
    Matrix c0 = start;
    if (restart > 0) {
      Rng rng(derive_seed(0xF17, static_cast<uint64_t>(restart)));
      c0 = Matrix::Zero(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) c0(i, j) = rng.complex_gaussian(0.5);
    }
    FitOutcome got = run_bfgs(prob, c0);
    if (got.loss < best.loss) best = std::move(got);
  }

  const Matrix cc = best.c * best.c.adjoint();
  LikelihoodReport rep;
  rep.engine = "moments";
  rep.iterations = best.iterations;
  rep.final_log_likelihood = -best.loss;  // sign-flipped weighted residual
  rep.delta_last = 0.0;
  rep.converged = best.converged;
  rep.stationary_gap = best.grad_norm;
  return {DensityMatrix::project(cc), rep};
}

std::pair<DensityMatrix, LikelihoodReport> mle_from_moments(
    const MomentTable& normal_a, int dim) {
  if (normal_a.tag() != Ordering::normal_a)
    throw std::invalid_argument("moment fit expects signal-mode moments");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");

  std::vector<Matrix> ops;
  std::vector<Complex> targets;
  std::vector<double> sigmas;
  const Matrix a = annihilation(dim);
  const int M = normal_a.max_order();
  for (int n = 0; n <= M; ++n) {
    for (int m = 0; n + m <= M; ++m) {
      if (n == 0 && m == 0) continue;  // pinned by the trace constraint
      Matrix op = Matrix::Identity(dim, dim);
      for (int k = 0; k < n; ++k) op = a.adjoint() * op;
      for (int k = 0; k < m; ++k) op = op * a;
      ops.push_back(std::move(op));
      targets.push_back(normal_a.value(n, m));
      sigmas.push_back(normal_a.sigma(n, m));
    }
  }
  return mle_from_operators(ops, targets, sigmas, dim);
}

std::vector<double> bootstrap_fidelities(const MeasurementRecord& record,
                                         const MomentTable& noise_h,
                                         int max_order, int dim,
                                         const FockVector& target,
                                         int n_resamples, uint64_t seed) {
  if (record.samples.empty())
    throw std::invalid_argument("cannot bootstrap an empty record");
  const size_t n = record.samples.size();
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_resamples));
  std::vector<Complex> resampled(n);
  for (int r = 0; r < n_resamples; ++r) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(r)));
    for (size_t i = 0; i < n; ++i) {
      const size_t k = std::min<size_t>(
          static_cast<size_t>(rng.uniform() * static_cast<double>(n)), n - 1);
      resampled[i] = record.samples[k];
    }
    const MomentTable s = empirical_s_moments(resampled, max_order);
    const MomentTable sig = deconvolve(s, noise_h);
    auto [rho, rep] = mle_from_moments(sig, dim);
    out.push_back(fidelity(rho, target));
  }
  return out;
}

}  // namespace qtomo
