#include "arealaw/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/SVD>

#include "arealaw/io.hpp"

namespace arealaw {

namespace {

void check_state(const CVector& state, int n_sites, int local_dim) {
  if (state.size() != ipow(local_dim, n_sites)) throw ConfigError("state dimension does not match chain");
}

} // namespace

double CutData::entropy() const { return entropy_of(weights()); }

int CutData::rank(double tol) const {
  return static_cast<int>((coefficients.array() > tol).count());
}

CVector CutData::reconstruct() const {
  const Index dl = left_basis.rows(), dr = right_basis.rows();
  CMatrix m = left_basis * coefficients.cast<Complex>().asDiagonal() * right_basis.transpose();
  // m(a, r) with a the left index; flatten row-major.
  CVector out(dl * dr);
  for (Index a = 0; a < dl; ++a)
    for (Index r = 0; r < dr; ++r) out(a * dr + r) = m(a, r);
  return out;
}

CMatrix reduced_density(const CVector& state, int n_sites, int local_dim, const Interval& x) {
  check_state(state, n_sites, local_dim);
  return kernels::reduced_density(state, split_for(x, n_sites, local_dim));
}

RVector interval_spectrum(const CVector& state, int n_sites, int local_dim, const Interval& x) {
  check_state(state, n_sites, local_dim);
  kernels::Split s = split_for(x, n_sites, local_dim);
  const Index rest = s.left * s.right;
  RVector ev;
  if (s.mid <= rest) {
    ev = linalg::eigvalsh(kernels::reduced_density(state, s));
  } else {
    // Gram matrix on the complement.
    CMatrix m(s.mid, rest);
    for (Index l = 0; l < s.left; ++l)
      for (Index k = 0; k < s.mid; ++k)
        for (Index r = 0; r < s.right; ++r) m(k, l * s.right + r) = state((l * s.mid + k) * s.right + r);
    CMatrix g = m.transpose() * m.conjugate();
    ev = linalg::eigvalsh(g);
  }
  ev.reverseInPlace();
  return ev;
}

CutData schmidt_cut(const CVector& state, int n_sites, int local_dim, int j) {
  check_state(state, n_sites, local_dim);
  if (j < 1 || j > n_sites - 1) throw ConfigError("cut " + std::to_string(j) + " out of range");
  const Index dl = ipow(local_dim, j), dr = ipow(local_dim, n_sites - j);
  Eigen::Map<const CMatrix> mt(state.data(), dr, dl);
  CMatrix m = mt.transpose();
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CutData c;
  c.cut = j;
  c.coefficients = svd.singularValues();
  c.left_basis = svd.matrixU();
  c.right_basis = svd.matrixV().conjugate();
  return c;
}

RVector clip_probabilities(RVector p) {
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) < -1e-10)
      throw NumericalError("density matrix has eigenvalue " + std::to_string(p(i)) + " below -1e-10");
    if (p(i) < 0.0) p(i) = 0.0;
  }
  return p;
}

RVector density_spectrum(const CMatrix& rho) {
  if (rho.rows() != rho.cols()) throw ConfigError("density matrix must be square");
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) throw NumericalError("density matrix trace " + std::to_string(tr) + " is not 1");
  return clip_probabilities(linalg::eigvalsh(rho));
}

double entropy_of(const RVector& p) {
  double s = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) s -= p(i) * std::log(p(i));
  return std::max(s, 0.0);
}

double renyi_of(const RVector& p, double alpha) {
  if (alpha <= 0.0) throw ConfigError("Renyi index must be positive");
  if (alpha == 1.0) return entropy_of(p);
  double t = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) t += std::pow(p(i), alpha);
  return std::max(std::log(t) / (1.0 - alpha), 0.0);
}

double von_neumann_entropy(const CMatrix& rho) { return entropy_of(density_spectrum(rho)); }

double renyi_entropy(const CMatrix& rho, double alpha) {
  if (alpha <= 0.0) throw ConfigError("Renyi index must be positive");
  return renyi_of(density_spectrum(rho), alpha);
}

double relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows() != sigma.rows()) throw ConfigError("relative_entropy: dimension mismatch");
  density_spectrum(rho);
  density_spectrum(sigma);
  HermitianEigen er = linalg::eigh(rho);
  HermitianEigen es = linalg::eigh(sigma);
  RVector p = clip_probabilities(er.values);
  RVector s = clip_probabilities(es.values);
  RMatrix overlap = linalg::adjoint_multiply(er.vectors, es.vectors).cwiseAbs2();
  // Small positive eigenvalues of sigma are kept: products of marginals
  // legitimately reach 1e-17. Only clipped zeros count as kernel.
  double value = entropy_of(p) * -1.0;
  for (Index k = 0; k < s.size(); ++k) {
    double w = 0.0;
    for (Index i = 0; i < p.size(); ++i) w += p(i) * overlap(i, k);
    if (s(k) <= 0.0 && w > 1e-8) return std::numeric_limits<double>::infinity();
    if (s(k) > 0.0) value -= w * std::log(s(k));
  }
  if (value < 0.0 && value > -1e-12) value = 0.0;
  return value;
}

double binary_relative_entropy(double p, double x) {
  if (p < 0.0 || p > 1.0 || x < 0.0 || x > 1.0) throw ConfigError("probabilities must lie in [0,1]");
  if ((x <= 0.0 || x >= 1.0) && p != x)
    throw NumericalError("classical divergence is infinite while the quantum one is finite");
  auto term = [](double a, double b) { return a > 0.0 ? a * std::log(a / b) : 0.0; };
  return term(p, x) + term(1.0 - p, 1.0 - x);
}

MeasurementBound lindblad_uhlmann_from_values(double rel_entropy, double p, double x) {
  MeasurementBound out;
  out.relative_entropy = rel_entropy;
  out.p = std::clamp(p, 0.0, 1.0);
  out.x = std::clamp(x, 0.0, 1.0);
  out.classical = binary_relative_entropy(out.p, out.x);
  out.slack = rel_entropy - out.classical;
  return out;
}

MeasurementBound lindblad_uhlmann_check(const CMatrix& rho, const CMatrix& sigma, const CMatrix& m) {
  RVector mev = linalg::eigvalsh(m);
  if (linalg::hermitian_deviation(m) > 1e-10 || mev.size() == 0 || mev(0) < -1e-10 || mev(mev.size() - 1) > 1 + 1e-10)
    throw ConfigError("measurement operator must satisfy 0 <= M <= 1");
  double p = (rho * m).trace().real();
  double x = (sigma * m).trace().real();
  return lindblad_uhlmann_from_values(relative_entropy(rho, sigma), p, x);
}

std::vector<EntropyProfileRow> entropy_profile(const CVector& state, int n_sites, int local_dim,
                                               const std::vector<double>& alphas, int keep) {
  std::vector<EntropyProfileRow> rows;
  for (int j = 1; j < n_sites; ++j) {
    CutData c = schmidt_cut(state, n_sites, local_dim, j);
    RVector w = c.weights();
    EntropyProfileRow row;
    row.cut = j;
    row.entropy = entropy_of(w);
    for (double a : alphas) row.renyi.push_back(renyi_of(w, a));
    for (Index k = 0; k < std::min<Index>(keep, c.coefficients.size()); ++k)
      row.top_coefficients.push_back(c.coefficients(k));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_entropy_profile_header(std::ostream& out, const std::vector<double>& alphas, int keep) {
  std::vector<std::string> cells{"cut", "S"};
  for (double a : alphas) cells.push_back("S_alpha=" + io::num(a));
  for (int k = 1; k <= keep; ++k) cells.push_back("c" + std::to_string(k));
  io::write_row(out, cells);
}

void write_entropy_profile_row(std::ostream& out, const EntropyProfileRow& row, int keep) {
  std::vector<std::string> cells{std::to_string(row.cut), io::num(row.entropy)};
  for (double r : row.renyi) cells.push_back(io::num(r));
  for (int k = 0; k < keep; ++k)
    cells.push_back(k < static_cast<int>(row.top_coefficients.size()) ? io::num(row.top_coefficients[k]) : "");
  io::write_row(out, cells);
}

} // namespace arealaw
