#include "arealaw/mps.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/SVD>

#include "arealaw/errors.hpp"
#include "arealaw/io.hpp"
#include "arealaw/kernels.hpp"

namespace arealaw {

std::vector<int> MatrixProductState::bond_dims() const {
  std::vector<int> out;
  for (int i = 0; i + 1 < n_sites; ++i) out.push_back(static_cast<int>(tensors[i][0].cols()));
  return out;
}

CVector MatrixProductState::contract() const {
  CMatrix c = CMatrix::Ones(1, 1);
  for (int i = 0; i < n_sites; ++i) {
    const Index chi = tensors[i][0].cols();
    CMatrix next(c.rows() * local_dim, chi);
    for (Index p = 0; p < c.rows(); ++p)
      for (int s = 0; s < local_dim; ++s) next.row(p * local_dim + s) = c.row(p) * tensors[i][s];
    c = std::move(next);
  }
  return c.col(0);
}

double MatrixProductState::left_canonical_defect() const {
  double worst = 0.0;
  for (int i = 0; i + 1 < n_sites; ++i) {
    const Index chi = tensors[i][0].cols();
    CMatrix g = CMatrix::Zero(chi, chi);
    for (int s = 0; s < local_dim; ++s) g += tensors[i][s].adjoint() * tensors[i][s];
    g -= CMatrix::Identity(chi, chi);
    worst = std::max(worst, linalg::operator_norm(g));
  }
  return worst;
}

MatrixProductState state_to_mps(const CVector& state, int n_sites, int local_dim, int max_bond,
                                double cut_tolerance, Index budget) {
  if (n_sites < 1 || local_dim < 1) throw ConfigError("state_to_mps: invalid chain shape");
  if (max_bond < 1) throw ConfigError("state_to_mps: max_bond must be >= 1");
  const Index dim = ipow(local_dim, n_sites);
  if (dim > budget) throw BudgetError("state_to_mps: D^N exceeds budget");
  if (state.size() != dim) throw ConfigError("state_to_mps: state dimension does not match D^N");

  MatrixProductState mps;
  mps.n_sites = n_sites;
  mps.local_dim = local_dim;
  mps.form = CanonicalForm::left;
  mps.tensors.resize(n_sites);
  mps.discarded.assign(std::max(0, n_sites - 1), 0.0);

  CMatrix rest = state.transpose();
  Index chi = 1;
  for (int i = 0; i + 1 < n_sites; ++i) {
    const Index cols = rest.cols() / local_dim;
    CMatrix m(chi * local_dim, cols);
    for (Index a = 0; a < chi; ++a)
      for (int s = 0; s < local_dim; ++s) m.row(a * local_dim + s) = rest.row(a).segment(s * cols, cols);
    Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& sv = svd.singularValues();
    Index keep = 0;
    while (keep < sv.size() && keep < max_bond && sv(keep) > cut_tolerance) ++keep;
    keep = std::max<Index>(keep, 1);
    const double total = sv.squaredNorm();
    const double dropped = sv.size() > keep ? sv.tail(sv.size() - keep).squaredNorm() : 0.0;
    mps.discarded[i] = total > 0.0 ? dropped / total : 0.0;

    mps.tensors[i].assign(local_dim, CMatrix(chi, keep));
    for (Index a = 0; a < chi; ++a)
      for (int s = 0; s < local_dim; ++s)
        mps.tensors[i][s].row(a) = svd.matrixU().row(a * local_dim + s).head(keep);
    rest = sv.head(keep).cast<Complex>().asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    chi = keep;
  }
  mps.tensors[n_sites - 1].assign(local_dim, CMatrix(chi, 1));
  for (int s = 0; s < local_dim; ++s) mps.tensors[n_sites - 1][s] = rest.col(s);
  return mps;
}

double infidelity(const CVector& phi, const CVector& psi) {
  const double n = phi.squaredNorm() * psi.squaredNorm();
  if (n == 0.0) throw NumericalError("infidelity: zero vector");
  return std::max(0.0, 1.0 - std::norm(phi.dot(psi)) / n);
}

double schmidt_tail(const CutData& cut, int k_prime) {
  if (k_prime < 1) throw ConfigError("schmidt_tail: k' must be >= 1");
  const RVector w = cut.weights();
  double tail = 0.0;
  for (Index a = k_prime - 1; a < w.size(); ++a) tail += w(a);
  return tail;
}

double k0_from_entropy(double s) {
  if (s < 0.0) throw ConfigError("k0_from_entropy: entropy must be non-negative");
  return std::exp(2.0 * s) / 2.0;
}

double k0_mass(const CutData& cut) {
  const double k0 = k0_from_entropy(std::max(0.0, cut.entropy()));
  const Index top = std::max<Index>(1, static_cast<Index>(std::ceil(k0)));
  const RVector w = cut.weights();
  return w.head(std::min(top, w.size())).sum();
}

std::vector<TailPoint> schmidt_tail_profile(const CutData& cut, int local_dim, double k0, double floor) {
  if (local_dim < 2) throw ConfigError("schmidt_tail_profile: local dimension must be >= 2");
  std::vector<TailPoint> out;
  const Index n = cut.coefficients.size();
  for (int m = 0;; ++m) {
    const double target = k0 * std::pow(double(local_dim), m);
    const int kp = std::max(1, static_cast<int>(std::ceil(target)));
    if (kp > n) break;
    const int actual = static_cast<int>(std::floor(std::log(kp / k0) / std::log(double(local_dim))));
    if (actual != m) continue;
    const double t = schmidt_tail(cut, kp);
    if (t < floor) break;
    out.push_back({m, kp, t});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Connected correlator across a window

namespace {

struct FarGeometry {
  int nl = 0;
  int nr = 0;
  Index dl = 1;
  Index dr = 1;
  Index dim = 1;
};

FarGeometry far_geometry(int n_sites, int local_dim, int j, int l) {
  if (j < 1 || j >= n_sites) throw ConfigError("cut j must satisfy 1 <= j <= N-1");
  if (l < 1) throw ConfigError("l must be >= 1");
  FarGeometry g;
  g.nl = std::max(0, j - l);
  g.nr = std::max(0, n_sites - j - l);
  g.dl = ipow(local_dim, g.nl);
  g.dr = ipow(local_dim, g.nr);
  g.dim = ipow(local_dim, n_sites);
  return g;
}

void check_far(const FarOperator& a, const FarGeometry& g) {
  if (a.left.rows() != g.dl || a.left.cols() != g.dl || a.right.rows() != g.dr || a.right.cols() != g.dr)
    throw ConfigError("operator A must act exactly on [1, j-l] and [j+l+1, N]");
}

CVector apply_far(const FarOperator& a, const FarGeometry& g, const CVector& v, bool left = true,
                  bool right = true) {
  CVector out = v;
  if (left && g.nl > 0) out = kernels::apply_local(a.left, {1, g.dl, g.dim / g.dl}, out);
  if (right && g.nr > 0) out = kernels::apply_local(a.right, {g.dim / g.dr, g.dr, 1}, out);
  return out;
}

CMatrix random_unitary(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) z(i, k) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

CMatrix polar_maximizer(const CMatrix& m) {
  // argmax_{|A| <= 1} Re tr(A m)
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

struct FunctionalContext {
  int n_sites, local_dim, j;
  FarGeometry g;
  CVector psi;
  CMatrix left_basis; // D^j x rank
  CMatrix psi_mat;    // D^j x D^{N-j}, row-major reshape of psi
  CMatrix y;          // left_basis^dagger psi_mat
  RVector lambda;     // |y_alpha|^2

  FunctionalContext(const CVector& state, int n, int d, int jj, int l)
      : n_sites(n), local_dim(d), j(jj), g(far_geometry(n, d, jj, l)) {
    if (state.size() != g.dim) throw ConfigError("state dimension does not match D^N");
    const double nrm = state.norm();
    if (nrm == 0.0) throw NumericalError("zero state");
    psi = state / nrm;
    const CutData cut = schmidt_cut(psi, n, d, jj);
    left_basis = cut.left_basis;
    const Index rows = ipow(d, jj), cols = g.dim / rows;
    psi_mat = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        psi.data(), rows, cols);
    y = left_basis.adjoint() * psi_mat;
    lambda = y.rowwise().squaredNorm();
  }

  CMatrix as_matrix(const CVector& v) const {
    return Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        v.data(), psi_mat.rows(), psi_mat.cols());
  }
  CVector as_vector(const CMatrix& m) const {
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = m;
    return Eigen::Map<const CVector>(r.data(), r.size());
  }

  CVector apply_b(const RVector& o) const {
    if (o.size() != left_basis.cols()) throw ConfigError("o_weights must have one entry per Schmidt vector");
    if ((o.array().abs() > 1.0 + 1e-12).any()) throw ConfigError("o_weights must satisfy |O(alpha)| <= 1");
    return as_vector(left_basis * (o.cast<Complex>().asDiagonal() * y));
  }

  double value(const FarOperator& a, const RVector& o) const {
    const CVector bpsi = apply_b(o);
    const CVector abpsi = apply_far(a, g, bpsi);
    const CVector apsi = apply_far(a, g, psi);
    const Complex ab = psi.dot(abpsi);
    const Complex av = psi.dot(apsi);
    const double bv = (o.array() * lambda.array()).sum();
    return std::real(ab - av * bv);
  }

  RVector best_signs(const FarOperator& a) const {
    FarOperator adj{a.left.adjoint(), a.right.adjoint()};
    const CVector u = apply_far(adj, g, psi); // A^dagger psi
    const CMatrix x = left_basis.adjoint() * as_matrix(u);
    const Complex av = psi.dot(apply_far(a, g, psi));
    RVector o(lambda.size());
    for (Index k = 0; k < o.size(); ++k) {
      const double gk = std::real(x.row(k).dot(y.row(k)) - av * lambda(k));
      o(k) = gk >= 0.0 ? 1.0 : -1.0;
    }
    return o;
  }

  // Phi = B_L psi - <B_L> psi
  CVector phi(const RVector& o) const {
    const double bv = (o.array() * lambda.array()).sum();
    return apply_b(o) - bv * psi;
  }

  CMatrix best_left(const FarOperator& a, const RVector& o) const {
    const CVector f = apply_far(a, g, phi(o), false, true);
    const Index rest = g.dim / g.dl;
    using RM = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const CMatrix fm = Eigen::Map<const RM>(f.data(), g.dl, rest);
    const CMatrix pm = Eigen::Map<const RM>(psi.data(), g.dl, rest);
    return polar_maximizer(fm * pm.adjoint());
  }

  CMatrix best_right(const FarOperator& a, const RVector& o) const {
    const CVector f = apply_far(a, g, phi(o), true, false);
    const Index rest = g.dim / g.dr;
    using RM = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const CMatrix fm = Eigen::Map<const RM>(f.data(), rest, g.dr);
    const CMatrix pm = Eigen::Map<const RM>(psi.data(), rest, g.dr);
    return polar_maximizer(fm.transpose() * pm.conjugate());
  }
};

} // namespace

FarOperator far_identity(int n_sites, int local_dim, int j, int l) {
  const FarGeometry g = far_geometry(n_sites, local_dim, j, l);
  return {CMatrix::Identity(g.dl, g.dl), CMatrix::Identity(g.dr, g.dr)};
}

double fwdback_functional(const CVector& state, int n_sites, int local_dim, int j, int l, const FarOperator& a,
                          const RVector& o_weights) {
  FunctionalContext ctx(state, n_sites, local_dim, j, l);
  check_far(a, ctx.g);
  if (linalg::operator_norm(a.left) * linalg::operator_norm(a.right) > 1.0 + 1e-10)
    throw ConfigError("operator A must satisfy ||A|| <= 1");
  return ctx.value(a, o_weights);
}

ProbeResult probe_functional(const CVector& state, int n_sites, int local_dim, int j, int l, std::mt19937_64& rng,
                             int sweeps) {
  FunctionalContext ctx(state, n_sites, local_dim, j, l);
  ProbeResult best;
  best.a = {random_unitary(ctx.g.dl, rng), random_unitary(ctx.g.dr, rng)};
  std::bernoulli_distribution coin(0.5);
  best.o_weights = RVector(ctx.lambda.size());
  for (Index k = 0; k < best.o_weights.size(); ++k) best.o_weights(k) = coin(rng) ? 1.0 : -1.0;
  best.value = ctx.value(best.a, best.o_weights);
  if (ctx.g.nl == 0 && ctx.g.nr == 0) return best; // A is a phase; functional vanishes

  FarOperator a = best.a;
  RVector o = best.o_weights;
  for (int it = 0; it < sweeps; ++it) {
    o = ctx.best_signs(a);
    if (ctx.g.nl > 0) a.left = ctx.best_left(a, o);
    if (ctx.g.nr > 0) a.right = ctx.best_right(a, o);
    const double v = ctx.value(a, o);
    const bool improved = v > best.value + 1e-13;
    if (v > best.value) best = {v, a, o};
    if (!improved) break;
  }
  return best;
}

double correlation_bound(double epsilon) {
  if (epsilon < 0.0) throw ConfigError("epsilon must be non-negative");
  return 3.0 * std::sqrt(2.0 * epsilon) + epsilon;
}

std::vector<ConjectureRow> conjecture_probe(const CVector& state, int n_sites, int local_dim,
                                            const std::vector<int>& l_list, int trials, uint64_t seed,
                                            const std::vector<double>& xi_primes, double c1) {
  const int j = n_sites / 2;
  const double entropy = schmidt_cut(state / state.norm(), n_sites, local_dim, j).entropy();
  std::vector<ConjectureRow> rows;
  for (int l : l_list) {
    std::mt19937_64 rng(seed + 7919ULL * static_cast<uint64_t>(l));
    double best = 0.0;
    for (int t = 0; t < trials; ++t)
      best = std::max(best, probe_functional(state, n_sites, local_dim, j, l, rng).value);
    for (double xp : xi_primes) {
      ConjectureRow r;
      r.l = l;
      r.trials = trials;
      r.max_functional = best;
      r.xi_prime = xp;
      r.epsilon = c1 * std::exp(-l / xp);
      r.bound_at_xi_prime = correlation_bound(r.epsilon);
      r.entropy = entropy;
      rows.push_back(r);
    }
  }
  return rows;
}

void write_probe_header(std::ostream& out) {
  io::write_row(out, {"l", "trials", "max_functional", "xi_prime", "epsilon", "bound_at_xi_prime", "entropy"});
}

void write_probe_row(std::ostream& out, const ConjectureRow& r) {
  io::write_row(out, {std::to_string(r.l), std::to_string(r.trials), io::num(r.max_functional), io::num(r.xi_prime),
                      io::num(r.epsilon), io::num(r.bound_at_xi_prime), io::num(r.entropy)});
}

} // namespace arealaw
