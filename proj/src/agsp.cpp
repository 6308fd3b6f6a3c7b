#include "arealaw/agsp.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <boost/numeric/odeint.hpp>

#include "arealaw/entanglement.hpp"
#include "arealaw/io.hpp"
#include "arealaw/kernels.hpp"

namespace arealaw {

AgspLayout agsp_layout(int n_sites, int j, int l) {
  if (n_sites < 2) throw ConfigError("AGSP needs at least two sites");
  if (j < 1 || j > n_sites - 1) throw ConfigError("cut " + std::to_string(j) + " out of range");
  if (l < 1) throw ConfigError("half-width l must be positive");
  if (l >= n_sites) throw ConfigError("window exceeds chain: l = " + std::to_string(l));
  AgspLayout a;
  a.n_sites = n_sites;
  a.j = j;
  a.l = l;
  a.r1 = std::max(1, static_cast<int>(std::lround(l / 3.0)));
  a.r2 = std::max(a.r1, static_cast<int>(std::lround(2.0 * l / 3.0)));
  for (int i = 1; i < n_sites; ++i) {
    if (i <= j - a.r1)
      a.left_bonds.push_back(i);
    else if (i <= j + a.r1)
      a.middle_bonds.push_back(i);
    else
      a.right_bonds.push_back(i);
  }
  a.left_half = {1, j};
  a.right_half = {j + 1, n_sites};
  a.left_region = clip({j - a.r2, j}, n_sites);
  a.middle_region = clip({j - a.r2, j + 1 + a.r2}, n_sites);
  a.right_region = clip({j + 1, j + 1 + a.r2}, n_sites);
  a.window = clip({j - l + 1, j + l}, n_sites);
  return a;
}

namespace {

double group_expectation(const Hamiltonian1D& h, const std::vector<int>& bonds, const CVector& psi) {
  double e = 0.0;
  for (int b : bonds) e += psi.dot(h.bond(b).apply(psi)).real();
  return e;
}

} // namespace

SplitHamiltonian split_hamiltonian(const Hamiltonian1D& h, const CVector& ground_state, int j, int l) {
  if (ground_state.size() != h.dimension()) throw ConfigError("ground state dimension mismatch");
  SplitHamiltonian s;
  s.layout = agsp_layout(h.n_sites, j, l);
  s.left = {s.layout.left_bonds, group_expectation(h, s.layout.left_bonds, ground_state)};
  s.middle = {s.layout.middle_bonds, group_expectation(h, s.layout.middle_bonds, ground_state)};
  s.right = {s.layout.right_bonds, group_expectation(h, s.layout.right_bonds, ground_state)};
  return s;
}

LocalOperator group_operator(const Hamiltonian1D& h, const BondGroup& g, const Interval& support) {
  LocalOperator out(h.n_sites, h.local_dim, support,
                    CMatrix::Zero(ipow(h.local_dim, support.length()), ipow(h.local_dim, support.length())));
  const int offset = support.first - 1;
  for (int b : g.bonds) {
    if (!support.contains(Interval{b, b + 1})) throw ConfigError("bond outside group support");
    LocalOperator piece(support.length(), h.local_dim, {b - offset, b + 1 - offset}, h.terms[b - 1]);
    piece.add_to(out.matrix);
  }
  out.matrix.diagonal().array() -= g.shift;
  return out;
}

CMatrix group_times(const Hamiltonian1D& h, const BondGroup& g, const CMatrix& x) {
  if (h.is_real() && linalg::is_real(x)) {
    RealSparseMatrix s = h.sparse_real(g.bonds, g.shift);
    RMatrix xr = x.real();
    RMatrix y = s * xr;
    return y.cast<Complex>();
  }
  SparseMatrix s = h.sparse(g.bonds, g.shift);
  CMatrix y = s * x;
  return y;
}

double filter_parameter(int l, double gap, double v) {
  if (v <= 0.0) throw ConfigError("Lieb-Robinson velocity must be positive");
  return (l / 3.0) * gap / (2.0 * v);
}

namespace {

// Sum of E_x(bond) over all bonds, minus shift, as an operator on x.
LocalOperator hamiltonian_expectation(const Hamiltonian1D& h, double shift, const Interval& x) {
  const Index dim = ipow(h.local_dim, x.length());
  LocalOperator out(h.n_sites, h.local_dim, x, CMatrix::Zero(dim, dim));
  for (int b = 1; b <= h.n_bonds(); ++b) out.matrix += conditional_expectation(h.bond(b), x).matrix;
  out.matrix.diagonal().array() -= shift;
  return out;
}

CMatrix filtered_group(const SpectralData& sd, const Hamiltonian1D& h, const BondGroup& g, double q) {
  CMatrix a_eig = linalg::adjoint_multiply(sd.eigenvectors, group_times(h, g, sd.eigenvectors));
  a_eig = gaussian_filter_eigenbasis(sd, std::move(a_eig), q);
  return from_eigenbasis(sd, a_eig);
}

double truncation_error(const LocalOperator& m, const CMatrix& filtered) {
  auto op = [&](const CVector& x) -> CVector { return m.apply(x) - filtered * x; };
  auto adj = [&](const CVector& x) -> CVector { return m.adjoint().apply(x) - filtered.adjoint() * x; };
  return linalg::spectral_norm(op, adj, filtered.rows()).value;
}

} // namespace

TruncatedPieces build_truncated_pieces(const SpectralData& sd, const Hamiltonian1D& h,
                                       const SplitHamiltonian& split, double v, const PieceOptions& opts) {
  if (!sd.complete) throw ConfigError("truncated pieces need a full eigendecomposition");
  const AgspLayout& a = split.layout;
  const int n = h.n_sites, d = h.local_dim;
  TruncatedPieces out;
  out.q = filter_parameter(a.l, sd.gap, v);

  LocalOperator h_left = group_operator(h, split.left, a.left_half);
  LocalOperator h_right = group_operator(h, split.right, a.right_half);
  LocalOperator h_mid = group_operator(h, split.middle, a.middle_region);

  // Middle piece: E(H~_B) = E(H - E0) - E(H~_L) - E(H~_R) on the middle region.
  LocalOperator e_mid = hamiltonian_expectation(h, split.left.shift + split.middle.shift + split.right.shift,
                                                a.middle_region);
  {
    CMatrix f = filtered_group(sd, h, split.left, out.q);
    LocalOperator e_region = conditional_expectation(f, n, d, a.left_region);
    e_mid.matrix -= conditional_expectation(f, n, d, a.middle_region).matrix;
    LocalOperator corr = sum(e_region, conditional_expectation(h_left, a.left_region), -1.0);
    out.m_left = sum(h_left, corr.extended(a.left_half));
    if (opts.measure_truncation_error) out.left_truncation_error = truncation_error(out.m_left, f);
  }
  {
    CMatrix f = filtered_group(sd, h, split.right, out.q);
    LocalOperator e_region = conditional_expectation(f, n, d, a.right_region);
    e_mid.matrix -= conditional_expectation(f, n, d, a.middle_region).matrix;
    LocalOperator corr = sum(e_region, conditional_expectation(h_right, a.right_region), -1.0);
    out.m_right = sum(h_right, corr.extended(a.right_half));
    if (opts.measure_truncation_error) out.right_truncation_error = truncation_error(out.m_right, f);
  }
  LocalOperator corr = sum(e_mid, conditional_expectation(h_mid, a.middle_region), -1.0);
  out.m_middle = sum(h_mid, corr);
  if (opts.measure_truncation_error) {
    CMatrix f = filtered_group(sd, h, split.middle, out.q);
    out.middle_truncation_error = truncation_error(out.m_middle, f);
  }

  const CVector psi = sd.ground_state();
  out.left_residual = out.m_left.apply(psi).norm();
  out.middle_residual = out.m_middle.apply(psi).norm();
  out.right_residual = out.m_right.apply(psi).norm();
  return out;
}

double side_threshold(double gap, double j_bound, int l, double xi) {
  if (gap <= 0.0 || xi <= 0.0) throw ConfigError("threshold needs positive gap and xi");
  return j_bound * j_bound / gap * std::exp(-l / (6.0 * xi));
}

namespace {

LocalOperator spectral_projector(const LocalOperator& m, const HermitianEigen& e, double threshold) {
  RVector keep = e.values.unaryExpr([&](double x) { return std::abs(x) <= threshold ? 1.0 : 0.0; });
  CMatrix p = linalg::multiply_adjoint(e.vectors * keep.asDiagonal(), e.vectors);
  return LocalOperator(m.n_sites, m.local_dim, m.support, linalg::hermitian_part(p));
}

} // namespace

SideProjectors build_side_projectors(const LocalOperator& m_left, const LocalOperator& m_right, double threshold,
                                     const CVector& ground_state) {
  if (threshold <= 0.0) throw ConfigError("side projector threshold must be positive");
  SideProjectors s;
  s.threshold = threshold;
  s.left_hermitian_deviation = linalg::hermitian_deviation(m_left.matrix);
  s.right_hermitian_deviation = linalg::hermitian_deviation(m_right.matrix);
  s.left_eigen = linalg::eigh(linalg::hermitian_part(m_left.matrix));
  s.right_eigen = linalg::eigh(linalg::hermitian_part(m_right.matrix));
  s.o_left = spectral_projector(m_left, s.left_eigen, threshold);
  s.o_right = spectral_projector(m_right, s.right_eigen, threshold);
  s.left_defect = (s.o_left.apply(ground_state) - ground_state).norm();
  s.right_defect = (s.o_right.apply(ground_state) - ground_state).norm();
  return s;
}

namespace {

struct ProductBasis {
  kernels::Split left, right;
  CMatrix w_left, w_right;
  RVector nu; // eigenvalues of K0, left index most significant
};

ProductBasis product_basis(const SideProjectors& sides) {
  const LocalOperator& ol = sides.o_left;
  const LocalOperator& orr = sides.o_right;
  if (ol.support.last + 1 != orr.support.first || ol.support.first != 1 || orr.support.last != ol.n_sites)
    throw ConfigError("side projectors must cover [1,j] and [j+1,N]");
  ProductBasis pb;
  pb.left = split_for(ol.support, ol.n_sites, ol.local_dim);
  pb.right = split_for(orr.support, orr.n_sites, orr.local_dim);
  pb.w_left = sides.left_eigen.vectors;
  pb.w_right = sides.right_eigen.vectors;
  const Index nl = pb.w_left.cols(), nr = pb.w_right.cols();
  pb.nu.resize(nl * nr);
  for (Index a = 0; a < nl; ++a)
    for (Index b = 0; b < nr; ++b) pb.nu(a * nr + b) = sides.left_eigen.values(a) + sides.right_eigen.values(b);
  return pb;
}

// x <- W^dagger x or W x, column by column.
void apply_product(const ProductBasis& pb, CMatrix& x, bool adjoint) {
  kernels::apply_local_columns(adjoint ? CMatrix(pb.w_left.adjoint()) : pb.w_left, pb.left, x);
  kernels::apply_local_columns(adjoint ? CMatrix(pb.w_right.adjoint()) : pb.w_right, pb.right, x);
}

CMatrix p_b_spectral(double gap, double q, const ProductBasis& pb, const SideProjectors& sides,
                     const TruncatedPieces& pieces) {
  const Index n = pieces.m_left.dimension();
  HermitianEigen k;
  {
    CMatrix kd = CMatrix::Zero(n, n);
    kernels::embed_add(kd, linalg::hermitian_part(pieces.m_left.matrix), pb.left);
    kernels::embed_add(kd, linalg::hermitian_part(pieces.m_right.matrix), pb.right);
    pieces.m_middle.add_to(kd);
    k = linalg::eigh(kd);
  }
  // c = W^dagger V_K, then c(m, n) *= G(nu_m - kappa_n)
  CMatrix c = k.vectors;
  apply_product(pb, c, true);
  kernels::gaussian_hadamard(c, pb.nu, k.values, q, gap);
  // P_B^dagger = W c V_K^dagger
  CMatrix s = linalg::multiply_adjoint(c, k.vectors);
  c.resize(0, 0);
  k.vectors.resize(0, 0);
  apply_product(pb, s, false);
  s.adjointInPlace();
  return s;
}

namespace odeint = boost::numeric::odeint;
using OdeState = std::vector<double>;

// Gaussian average of U-hat(t) in the K0 eigenbasis.
CMatrix p_b_ode(double gap, double q, const ProductBasis& pb, const TruncatedPieces& pieces,
                const BondOperatorOptions& opts, double* drift_out) {
  const Index n = pieces.m_left.dimension();
  CMatrix b = CMatrix::Zero(n, n);
  pieces.m_middle.add_to(b);
  apply_product(pb, b, true);
  b.adjointInPlace();
  apply_product(pb, b, true);
  b.adjointInPlace(); // W^dagger M_B W

  QuadratureRule rule = gaussian_time_rule(q, gap, opts.quadrature_nodes);
  CMatrix acc = CMatrix::Zero(n, n);
  double worst = 0.0;

  for (int sign : {1, -1}) {
    std::vector<double> times{0.0};
    std::vector<double> weights{0.0};
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
      double t = rule.nodes[k];
      if ((sign > 0 && t >= 0.0) || (sign < 0 && t < 0.0)) {
        times.push_back(std::abs(t));
        weights.push_back(rule.weights[k]);
      }
    }
    if (times.size() == 1) continue;
    std::vector<size_t> order(times.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return times[x] < times[y]; });
    std::vector<double> sorted_t;
    for (size_t i : order) sorted_t.push_back(times[i]);

    // s = |t|; dU/ds = sign * i U B^int(sign * s)
    CMatrix bint(n, n);
    auto rhs = [&](const OdeState& u, OdeState& du, double s) {
      const double t = sign * s;
      for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r) bint(r, c) = b(r, c) * std::polar(1.0, (pb.nu(r) - pb.nu(c)) * t);
      Eigen::Map<const CMatrix> um(reinterpret_cast<const Complex*>(u.data()), n, n);
      Eigen::Map<CMatrix> dm(reinterpret_cast<Complex*>(du.data()), n, n);
      dm.noalias() = Complex(0.0, sign) * (um * bint);
    };
    OdeState u(2 * n * n, 0.0);
    for (Index i = 0; i < n; ++i) u[2 * (i * n + i)] = 1.0;
    size_t step = 0;
    auto observe = [&](const OdeState& x, double s) {
      Eigen::Map<const CMatrix> um(reinterpret_cast<const Complex*>(x.data()), n, n);
      const size_t idx = order[step++];
      if (s > 0.0) {
        double drift = (um.adjoint() * um - CMatrix::Identity(n, n)).norm();
        worst = std::max(worst, drift / s);
      }
      if (weights[idx] != 0.0) acc += weights[idx] * um;
    };
    auto stepper = odeint::make_dense_output(opts.ode_tolerance, opts.ode_tolerance,
                                             odeint::runge_kutta_dopri5<OdeState>());
    odeint::integrate_times(stepper, rhs, u, sorted_t.begin(), sorted_t.end(), 1e-2, observe);
  }
  if (drift_out) *drift_out = worst;
  if (worst > opts.unitarity_drift_per_time)
    throw NumericalError("integrator tolerance not met: unitarity drift " + std::to_string(worst) + " per unit time");
  // P_B = W acc W^dagger
  apply_product(pb, acc, false);
  acc.adjointInPlace();
  apply_product(pb, acc, false);
  acc.adjointInPlace();
  return acc;
}

} // namespace

CMatrix build_p_b(double gap, const SideProjectors& sides, const TruncatedPieces& pieces,
                  const BondOperatorOptions& opts, double* drift) {
  if (pieces.q <= 0.0) throw ConfigError("filter parameter q must be positive");
  ProductBasis pb = product_basis(sides);
  if (opts.method == PropagatorMethod::ode) return p_b_ode(gap, pieces.q, pb, pieces, opts, drift);
  if (drift) *drift = 0.0;
  return p_b_spectral(gap, pieces.q, pb, sides, pieces);
}

BondOperator build_o_b(double gap, const SideProjectors& sides, const TruncatedPieces& pieces,
                       const AgspLayout& layout, const BondOperatorOptions& opts) {
  BondOperator out;
  CMatrix p = build_p_b(gap, sides, pieces, opts, &out.max_unitarity_drift);
  out.p_b_norm = linalg::operator_norm(p);
  out.o_b = conditional_expectation(p, layout.n_sites, pieces.m_left.local_dim, layout.window);
  const double nrm = out.o_b.norm();
  if (nrm > 1.0 + 1e-6) throw NumericalError("||O_B|| = " + std::to_string(nrm) + " exceeds 1 + 1e-6");
  if (nrm > 1.0) {
    out.scale = 1.0 / nrm;
    out.o_b.matrix *= out.scale;
  }
  return out;
}

double positivization_bound(double epsilon) {
  double a = 1.0 - (1.0 - epsilon) * (1.0 - epsilon);
  return std::sqrt(std::max(a, 0.0)) + 3.0 * epsilon + epsilon * epsilon;
}

Positivized positivize(const CMatrix& b_in, const CMatrix& q, const CMatrix& p) {
  if (linalg::hermitian_deviation(q) > 1e-10 || linalg::operator_norm(q * q - q) > 1e-10)
    throw ConfigError("Q is not a projector");
  Positivized out;
  CMatrix b = b_in;
  double nrm = linalg::operator_norm(b);
  if (nrm > 1.0 + 1e-6) throw NumericalError("||B|| exceeds 1 + 1e-6");
  if (nrm > 1.0) {
    out.report.scale = 1.0 / nrm;
    b *= out.report.scale;
  }
  out.b_plus = linalg::hermitian_part(b.adjoint() * b);
  out.report.epsilon = linalg::operator_norm(b * q - p);
  out.report.measured = linalg::operator_norm(out.b_plus * q - p);
  out.report.bound = positivization_bound(out.report.epsilon);
  out.report.holds = out.report.measured <= out.report.bound + 1e-10;
  return out;
}

AGSPTriple assemble_and_measure(const CVector& psi, const LocalOperator& o_left, const LocalOperator& o_b,
                                const LocalOperator& o_right, int j, int l, double q) {
  for (const LocalOperator* o : {&o_left, &o_right}) {
    if (linalg::hermitian_deviation(o->matrix) > 1e-10 ||
        linalg::operator_norm(o->matrix * o->matrix - o->matrix) > 1e-10)
      throw ConfigError("side operators must be Hermitian projectors");
  }
  if (distance(o_left.support, o_right.support) == 0) throw ConfigError("O_L and O_R supports overlap");
  AGSPTriple t;
  t.j = j;
  t.l = l;
  t.q = q;
  t.o_left = o_left;
  t.o_right = o_right;
  t.o_b = o_b;
  t.o_b_plus = LocalOperator(o_b.n_sites, o_b.local_dim, o_b.support,
                             linalg::hermitian_part(linalg::adjoint_multiply(o_b.matrix, o_b.matrix)));
  t.o_b_norm = o_b.norm();
  t.o_b_plus_norm = t.o_b_plus.norm();
  const Index n = psi.size();
  LocalOperator o_b_adj = o_b.adjoint();

  auto projected = [&](const CVector& x) { return o_left.apply(o_right.apply(x)); };
  auto make = [&](const LocalOperator& b, const LocalOperator& b_adj) {
    auto fwd = [&](const CVector& x) -> CVector { return b.apply(projected(x)) - psi * psi.dot(x); };
    auto adj = [&](const CVector& x) -> CVector { return projected(b_adj.apply(x)) - psi * psi.dot(x); };
    auto e = linalg::spectral_norm(fwd, adj, n);
    if (!e.converged) throw NumericalError("AGSP error estimate did not converge");
    return e.value;
  };
  t.epsilon = make(o_b, o_b_adj);
  t.epsilon_plus = make(t.o_b_plus, t.o_b_plus);
  t.positivization.epsilon = t.epsilon;
  t.positivization.measured = t.epsilon_plus;
  t.positivization.bound = positivization_bound(t.epsilon);
  t.positivization.holds = t.epsilon_plus <= t.positivization.bound + 1e-10;

  t.o_b_expectation = psi.dot(o_b.apply(psi)).real();
  t.q_expectation = psi.dot(projected(psi)).real();
  t.expectation_chain_holds =
      t.o_b_expectation >= 1.0 - 2.0 * t.epsilon - 1e-12 && t.q_expectation >= 1.0 - 2.0 * t.epsilon - 1e-12;
  return t;
}

AgspResult build_agsp(const Hamiltonian1D& h, const SpectralData& sd, int j, int l, const AgspOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  AgspResult r;
  const CVector psi = sd.ground_state();
  r.split = split_hamiltonian(h, psi, j, l);
  r.pieces = build_truncated_pieces(sd, h, r.split, opts.v, opts.pieces);
  const double xi = opts.xi > 0.0 ? opts.xi : std::max(2.0 * opts.v / sd.gap, 1.0);
  r.threshold = side_threshold(sd.gap, h.j_bound, l, xi);
  SideProjectors sides = build_side_projectors(r.pieces.m_left, r.pieces.m_right, r.threshold, psi);
  r.left_defect = sides.left_defect;
  r.right_defect = sides.right_defect;
  r.left_rank = static_cast<int>(std::lround(sides.o_left.matrix.trace().real()));
  r.right_rank = static_cast<int>(std::lround(sides.o_right.matrix.trace().real()));
  BondOperator ob = build_o_b(sd.gap, sides, r.pieces, r.split.layout, opts.bond);
  r.triple = assemble_and_measure(psi, sides.o_left, ob.o_b, sides.o_right, j, l, r.pieces.q);
  r.triple.o_b_scale = ob.scale;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ChainMeasurement measure_chain(const CVector& psi, const AGSPTriple& t) {
  const int n = t.o_b.n_sites, d = t.o_b.local_dim;
  ChainMeasurement c;
  c.j = t.j;
  c.l = t.l;
  c.epsilon = t.epsilon;
  c.epsilon_plus = t.epsilon_plus;
  const CutData cut = schmidt_cut(psi, n, d, t.j);
  c.p_overlap = cut.coefficients.array().pow(4).sum();
  c.y = psi.dot(t.o_left.apply(psi)).real() * psi.dot(t.o_right.apply(psi)).real();
  c.p_plus = t.o_b.apply(psi).squaredNorm();

  const Interval w = t.o_b.support;
  if (!w.contains(t.j) || !w.contains(t.j + 1)) throw ConfigError("O_B window must straddle the cut");
  const Interval a{w.first, t.j}, b{t.j + 1, w.last};
  const HermitianEigen ea = linalg::eigh(reduced_density(psi, n, d, a));
  const HermitianEigen eb = linalg::eigh(reduced_density(psi, n, d, b));
  const RVector pa = clip_probabilities(ea.values), pb = clip_probabilities(eb.values);
  c.s_left = entropy_of(pa);
  c.s_right = entropy_of(pb);
  c.s_joint = entropy_of(interval_spectrum(psi, n, d, w));

  // Y = W^dagger O_B^dagger with W = U_A (x) U_B, applied factor by factor
  const Index da = ea.vectors.rows(), db = eb.vectors.rows();
  CMatrix y = t.o_b.matrix.adjoint();
  kernels::apply_local_columns(eb.vectors.adjoint(), {da, db, 1}, y);
  kernels::apply_local_columns(ea.vectors.adjoint(), {1, da, db}, y);
  double x = 0.0, xp = 0.0;
  for (Index ia = 0; ia < da; ++ia)
    for (Index ib = 0; ib < db; ++ib) {
      const Index m = ia * db + ib;
      const double weight = pa(ia) * pb(ib);
      if (weight == 0.0) continue;
      Complex diag = 0.0;
      for (Index na = 0; na < da; ++na)
        for (Index nb = 0; nb < db; ++nb)
          diag += y(m, na * db + nb) * ea.vectors(na, ia) * eb.vectors(nb, ib);
      x += weight * diag.real();
      xp += weight * y.row(m).squaredNorm();
    }
  c.x = x;
  c.x_plus = xp;
  return c;
}

void write_agsp_header(std::ostream& out) {
  io::write_row(out, {"j", "l", "q", "epsilon", "epsilon_plus", "ob_gs", "ml_psi", "mb_psi", "mr_psi"});
}

void write_agsp_row(std::ostream& out, const AgspResult& r) {
  const AGSPTriple& t = r.triple;
  io::write_row(out, {std::to_string(t.j), std::to_string(t.l), io::num(t.q), io::num(t.epsilon),
                      io::num(t.epsilon_plus), io::num(t.o_b_expectation), io::num(r.pieces.left_residual),
                      io::num(r.pieces.middle_residual), io::num(r.pieces.right_residual)});
}

} // namespace arealaw
