#include "arealaw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda, double* w, double* work,
             const int* lwork, int* iwork, const int* liwork, int* info, size_t, size_t);
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a, const int* lda, double* w,
             std::complex<double>* work, const int* lwork, double* rwork, const int* lrwork, int* iwork,
             const int* liwork, int* info, size_t, size_t);
}

// OpenBLAS picks its kernels from the CPU id when it initializes. On some
// virtualized Cooper Lake hosts the detected dgemm kernel returns wrong
// results, so pin a kernel family unless the user chose one. OpenBLAS is
// linked statically and this runs before its own constructor.
__attribute__((constructor(101))) static void pin_openblas_core() {
  setenv("OPENBLAS_CORETYPE", "SkylakeX", 0);
}

namespace arealaw::linalg {

namespace {

int real_eig(char jobz, int n, double* a, double* w) {
  int info = 0, lwork = -1, liwork = -1, iwork_query = 0;
  double work_query = 0.0;
  dsyevd_(&jobz, "L", &n, a, &n, w, &work_query, &lwork, &iwork_query, &liwork, &info, 1, 1);
  if (info != 0) return info;
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(std::max(lwork, 1));
  std::vector<int> iwork(std::max(liwork, 1));
  dsyevd_(&jobz, "L", &n, a, &n, w, work.data(), &lwork, iwork.data(), &liwork, &info, 1, 1);
  return info;
}

int complex_eig(char jobz, int n, std::complex<double>* a, double* w) {
  int info = 0, lwork = -1, lrwork = -1, liwork = -1, iwork_query = 0;
  std::complex<double> work_query = 0.0;
  double rwork_query = 0.0;
  zheevd_(&jobz, "L", &n, a, &n, w, &work_query, &lwork, &rwork_query, &lrwork, &iwork_query, &liwork, &info, 1, 1);
  if (info != 0) return info;
  lwork = static_cast<int>(work_query.real());
  lrwork = static_cast<int>(rwork_query);
  liwork = iwork_query;
  std::vector<std::complex<double>> work(std::max(lwork, 1));
  std::vector<double> rwork(std::max(lrwork, 1));
  std::vector<int> iwork(std::max(liwork, 1));
  zheevd_(&jobz, "L", &n, a, &n, w, work.data(), &lwork, rwork.data(), &lrwork, iwork.data(), &liwork, &info, 1, 1);
  return info;
}

} // namespace

bool is_real(const CMatrix& a, double tol) {
  const Complex* p = a.data();
  const Index n = a.size();
  for (Index i = 0; i < n; ++i)
    if (std::abs(p[i].imag()) > tol) return false;
  return true;
}

HermitianEigen eigh(const CMatrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("eigh: matrix not square");
  const Index n = a.rows();
  HermitianEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  int info = 0;
  if (is_real(a)) {
    RMatrix w = a.real();
    info = real_eig('V', static_cast<int>(n), w.data(), out.values.data());
    out.vectors = w.cast<Complex>();
  } else {
    out.vectors = a;
    info = complex_eig('V', static_cast<int>(n), out.vectors.data(), out.values.data());
  }
  if (info != 0) throw NumericalError("eigh: LAPACK returned " + std::to_string(info));
  return out;
}

RVector eigvalsh(const CMatrix& a) {
  const Index n = a.rows();
  RVector values(n);
  if (n == 0) return values;
  int info = 0;
  if (is_real(a)) {
    RMatrix w = a.real();
    info = real_eig('N', static_cast<int>(n), w.data(), values.data());
  } else {
    CMatrix w = a;
    info = complex_eig('N', static_cast<int>(n), w.data(), values.data());
  }
  if (info != 0) throw NumericalError("eigvalsh: LAPACK returned " + std::to_string(info));
  return values;
}

CMatrix multiply(const CMatrix& a, const CMatrix& b) {
  if (is_real(a) && is_real(b)) {
    RMatrix c = a.real() * b.real();
    return c.cast<Complex>();
  }
  CMatrix c = a * b;
  return c;
}

CMatrix adjoint_multiply(const CMatrix& a, const CMatrix& b) {
  if (is_real(a) && is_real(b)) {
    RMatrix c = a.real().transpose() * b.real();
    return c.cast<Complex>();
  }
  CMatrix c = a.adjoint() * b;
  return c;
}

CMatrix multiply_adjoint(const CMatrix& a, const CMatrix& b) {
  if (is_real(a) && is_real(b)) {
    RMatrix c = a.real() * b.real().transpose();
    return c.cast<Complex>();
  }
  CMatrix c = a * b.adjoint();
  return c;
}

CMatrix hermitian_part(const CMatrix& a) {
  CMatrix h = 0.5 * (a + a.adjoint());
  return h;
}

double hermitian_deviation(const CMatrix& a) {
  CMatrix d = 0.5 * (a - a.adjoint());
  return operator_norm(d);
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (std::min(a.rows(), a.cols()) <= 512) {
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
  }
  auto fwd = [&](const CVector& x) -> CVector { return a * x; };
  auto adj = [&](const CVector& x) -> CVector { return a.adjoint() * x; };
  NormEstimate e = spectral_norm(fwd, adj, a.cols());
  if (e.converged) return e.value;
  const RVector ev = eigvalsh(hermitian_part(adjoint_multiply(a, a)));
  return std::sqrt(std::max(ev(ev.size() - 1), 0.0));
}

double hermitian_norm(const CMatrix& a) {
  RVector ev = eigvalsh(a);
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double trace_norm_hermitian(const CMatrix& a) {
  return eigvalsh(a).cwiseAbs().sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

CMatrix apply_function(const HermitianEigen& e, const std::function<double(double)>& f) {
  RVector fv = e.values.unaryExpr(f);
  CMatrix scaled = e.vectors * fv.asDiagonal();
  return multiply_adjoint(scaled, e.vectors);
}

namespace {

CVector random_unit(Index dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
  v.normalize();
  return v;
}

// Lanczos with full reorthogonalization. `done` inspects the current Ritz
// decomposition and returns true when converged.
template <class Done>
void lanczos_core(const LinearMap& op, Index dim, int max_iterations, unsigned seed,
                  std::vector<CVector>& basis, std::vector<double>& alpha,
                  std::vector<double>& beta, Done done) {
  CVector q = random_unit(dim, seed);
  const int m_max = static_cast<int>(std::min<Index>(max_iterations, dim));
  for (int k = 0; k < m_max; ++k) {
    basis.push_back(q);
    CVector w = op(q);
    double a = basis.back().dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const CVector& b : basis) w -= b * b.dot(w);
    double bnorm = w.norm();
    beta.push_back(bnorm);
    if (done(k + 1, bnorm)) return;
    if (bnorm < 1e-14 * std::max(1.0, std::abs(a))) {
      // Invariant subspace; restart with a vector orthogonal to the basis.
      CVector r = random_unit(dim, seed + static_cast<unsigned>(k) + 1);
      for (int pass = 0; pass < 2; ++pass)
        for (const CVector& b : basis) r -= b * b.dot(r);
      double rn = r.norm();
      if (rn < 1e-12) return;
      beta.back() = 0.0;
      q = r / rn;
    } else {
      q = w / bnorm;
    }
  }
}

Eigen::SelfAdjointEigenSolver<RMatrix> tridiagonal_eigen(const std::vector<double>& alpha,
                                                         const std::vector<double>& beta, int m) {
  RMatrix t = RMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  return Eigen::SelfAdjointEigenSolver<RMatrix>(t);
}

} // namespace

NormEstimate spectral_norm(const LinearMap& apply, const LinearMap& apply_adjoint, Index dim,
                           int max_iterations, double rel_tol) {
  NormEstimate out;
  if (dim == 0) {
    out.converged = true;
    return out;
  }
  auto gram = [&](const CVector& x) -> CVector { return apply_adjoint(apply(x)); };
  std::vector<CVector> basis;
  std::vector<double> alpha, beta;
  double previous = -1.0;
  double top = 0.0;
  int stable_steps = 0;
  lanczos_core(gram, dim, max_iterations, 11u, basis, alpha, beta, [&](int m, double b) {
    auto es = tridiagonal_eigen(alpha, beta, m);
    top = es.eigenvalues()(m - 1);
    double residual = std::abs(b * es.eigenvectors()(m - 1, m - 1));
    out.iterations = m;
    // Ritz values increase monotonically toward the top eigenvalue; a
    // clustered top makes the vector converge slowly but not the value.
    if (previous >= 0.0 && std::abs(top - previous) <= rel_tol * std::max(top, 1e-300))
      ++stable_steps;
    else
      stable_steps = 0;
    previous = top;
    if (m == dim || residual <= 1e-7 * std::max(top, 1e-300) || stable_steps >= 3 || (top == 0.0 && b == 0.0)) {
      out.converged = true;
      return true;
    }
    return false;
  });
  if (!out.converged && static_cast<Index>(alpha.size()) == dim) out.converged = true;
  out.value = std::sqrt(std::max(top, 0.0));
  return out;
}

LanczosResult lanczos_lowest(const LinearMap& apply, Index dim, int count, int max_iterations,
                             double tol, unsigned seed) {
  LanczosResult out;
  std::vector<CVector> basis;
  std::vector<double> alpha, beta;
  RMatrix ritz_vectors;
  lanczos_core(apply, dim, max_iterations, seed, basis, alpha, beta, [&](int m, double b) {
    out.iterations = m;
    if (m < count) return false;
    auto es = tridiagonal_eigen(alpha, beta, m);
    double scale = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m - 1)));
    bool ok = true;
    for (int i = 0; i < count; ++i)
      if (std::abs(b * es.eigenvectors()(m - 1, i)) > tol * std::max(scale, 1.0)) ok = false;
    if (ok || m == dim) {
      out.converged = true;
      out.values = es.eigenvalues().head(count);
      ritz_vectors = es.eigenvectors().leftCols(count);
      return true;
    }
    return false;
  });
  if (!out.converged) return out;
  const Index m = ritz_vectors.rows();
  out.vectors = CMatrix::Zero(dim, count);
  for (Index k = 0; k < m; ++k)
    for (int i = 0; i < count; ++i) out.vectors.col(i) += basis[k] * ritz_vectors(k, i);
  for (int i = 0; i < count; ++i) out.vectors.col(i).normalize();
  return out;
}

} // namespace arealaw::linalg
