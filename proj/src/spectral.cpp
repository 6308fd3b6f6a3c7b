#include "arealaw/spectral.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace arealaw {

CMatrix SpectralData::ground_projector() const {
  CVector g = ground_state();
  CMatrix p = g * g.adjoint();
  return p;
}

namespace {

void finish(SpectralData& sd, const Hamiltonian1D& h, const DiagonalizationOptions& opts) {
  sd.n_sites = h.n_sites;
  sd.local_dim = h.local_dim;
  sd.j_bound = h.j_bound;
  sd.ground_energy = sd.energies(0);
  sd.energies.array() -= sd.ground_energy;
  sd.energies(0) = 0.0;
  if (sd.energies.size() < 2) {
    sd.gap = std::numeric_limits<double>::infinity();
    return;
  }
  sd.gap = sd.energies(1);
  if (opts.degeneracy_tolerance >= 0.0 && sd.gap <= opts.degeneracy_tolerance * h.j_bound)
    throw DegenerateGroundState("ground state is degenerate: gap " + std::to_string(sd.gap));
}

} // namespace

SpectralData diagonalize(const Hamiltonian1D& h, const DiagonalizationOptions& opts) {
  const Index n = h.dimension();
  SpectralData sd;
  if (opts.mode == DiagonalizationMode::full) {
    if (n > opts.max_full_dimension)
      throw BudgetError("dimension " + std::to_string(n) + " exceeds the dense budget");
    HermitianEigen e = linalg::eigh(h.dense());
    sd.energies = std::move(e.values);
    sd.eigenvectors = std::move(e.vectors);
    sd.complete = true;
  } else {
    if (n > opts.max_sparse_dimension)
      throw BudgetError("dimension " + std::to_string(n) + " exceeds the sparse budget");
    const int count = std::max(2, opts.lowest_count);
    if (n <= count) {
      DiagonalizationOptions full = opts;
      full.mode = DiagonalizationMode::full;
      return diagonalize(h, full);
    }
    auto op = [&](const CVector& v) { return h.apply(v); };
    auto r = linalg::lanczos_lowest(op, n, count, opts.max_lanczos_iterations, 1e-12);
    if (!r.converged) throw NumericalError("Lanczos did not converge");
    sd.energies = r.values;
    sd.eigenvectors = r.vectors;
    sd.complete = false;
  }
  finish(sd, h, opts);
  double scale = std::max(std::abs(sd.ground_energy), std::abs(sd.ground_energy + sd.energies.maxCoeff()));
  double res = max_residual(h, sd);
  if (res > opts.residual_tolerance * std::max(scale, 1.0))
    throw NumericalError("eigenpair residual " + std::to_string(res) + " above tolerance");
  return sd;
}

double max_residual(const Hamiltonian1D& h, const SpectralData& sd) {
  const Index n = sd.dimension();
  if (n == 0 || h.n_bonds() == 0) {
    // H = 0: the residual is |E| per vector.
    return std::abs(sd.ground_energy) + (sd.energies.size() ? sd.energies.cwiseAbs().maxCoeff() : 0.0);
  }
  double worst = 0.0;
  if (h.is_real() && linalg::is_real(sd.eigenvectors)) {
    RealSparseMatrix hs = h.sparse_real(h.all_bonds());
    RMatrix v = sd.eigenvectors.real();
    RMatrix r = hs * v;
    for (Index k = 0; k < v.cols(); ++k)
      worst = std::max(worst, (r.col(k) - (sd.energies(k) + sd.ground_energy) * v.col(k)).norm());
  } else {
    SparseMatrix hs = h.sparse(h.all_bonds());
    CMatrix r = hs * sd.eigenvectors;
    for (Index k = 0; k < r.cols(); ++k)
      worst = std::max(worst, (r.col(k) - (sd.energies(k) + sd.ground_energy) * sd.eigenvectors.col(k)).norm());
  }
  return worst;
}

namespace {

void require_complete(const SpectralData& sd, const char* what) {
  if (!sd.complete) throw ConfigError(std::string(what) + " needs a full eigendecomposition");
}

void require_dimension(const SpectralData& sd, const CMatrix& a, const char* what) {
  if (a.rows() != sd.dimension() || a.cols() != sd.dimension())
    throw ConfigError(std::string(what) + ": dimension mismatch");
}

} // namespace

CMatrix to_eigenbasis(const SpectralData& sd, const CMatrix& a) {
  require_complete(sd, "to_eigenbasis");
  require_dimension(sd, a, "to_eigenbasis");
  return linalg::adjoint_multiply(sd.eigenvectors, linalg::multiply(a, sd.eigenvectors));
}

CMatrix from_eigenbasis(const SpectralData& sd, const CMatrix& a) {
  require_complete(sd, "from_eigenbasis");
  require_dimension(sd, a, "from_eigenbasis");
  return linalg::multiply_adjoint(linalg::multiply(sd.eigenvectors, a), sd.eigenvectors);
}

CMatrix evolve(const SpectralData& sd, const CMatrix& a, double t) {
  CMatrix b = to_eigenbasis(sd, a);
  const Index n = b.rows();
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) b(r, c) *= std::polar(1.0, (sd.energies(r) - sd.energies(c)) * t);
  return from_eigenbasis(sd, b);
}

CMatrix gaussian_filter_eigenbasis(const SpectralData& sd, CMatrix a_eig, double q) {
  if (q <= 0.0) throw ConfigError("filter parameter q must be positive");
  require_dimension(sd, a_eig, "gaussian_filter");
  kernels::gaussian_hadamard(a_eig, sd.energies, sd.energies, q, sd.gap);
  return a_eig;
}

CMatrix gaussian_filter_operator(const SpectralData& sd, const CMatrix& a, double q) {
  return from_eigenbasis(sd, gaussian_filter_eigenbasis(sd, to_eigenbasis(sd, a), q));
}

CMatrix gaussian_filter_projector(const SpectralData& sd, double q) {
  if (q <= 0.0) throw ConfigError("filter parameter q must be positive");
  require_complete(sd, "gaussian_filter_projector");
  const double g2 = std::isfinite(sd.gap) ? sd.gap * sd.gap : std::numeric_limits<double>::infinity();
  RVector w = sd.energies.unaryExpr([&](double e) { return e == 0.0 ? 1.0 : std::exp(-q * e * e / (2.0 * g2)); });
  CMatrix scaled = sd.eigenvectors * w.asDiagonal();
  return linalg::multiply_adjoint(scaled, sd.eigenvectors);
}

namespace {

CMatrix shifted_dense(const Hamiltonian1D& h, const SpectralData& sd) {
  CMatrix hd = h.n_bonds() ? h.dense() : CMatrix::Zero(sd.dimension(), sd.dimension());
  hd.diagonal().array() -= sd.ground_energy;
  return hd;
}

} // namespace

CMatrix quadrature_filter_operator(const Hamiltonian1D& h, const SpectralData& sd, const CMatrix& a,
                                   double q, const QuadratureRule& rule) {
  require_dimension(sd, a, "quadrature_filter_operator");
  CMatrix hd = shifted_dense(h, sd);
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  for (size_t k = 0; k < rule.nodes.size(); ++k) {
    CMatrix gen = Complex(0.0, rule.nodes[k]) * hd;
    CMatrix u = gen.exp();
    out += rule.weights[k] * (u * a * u.adjoint());
  }
  return out;
}

CMatrix quadrature_filter_projector(const Hamiltonian1D& h, const SpectralData& sd, double q,
                                    const QuadratureRule& rule) {
  CMatrix hd = shifted_dense(h, sd);
  CMatrix out = CMatrix::Zero(hd.rows(), hd.cols());
  for (size_t k = 0; k < rule.nodes.size(); ++k) {
    CMatrix gen = Complex(0.0, rule.nodes[k]) * hd;
    out += rule.weights[k] * gen.exp();
  }
  return out;
}

std::uint64_t content_hash(const Hamiltonian1D& h) {
  std::uint64_t x = 1469598103934665603ull;
  auto mix = [&](const void* p, size_t n) {
    auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      x ^= b[i];
      x *= 1099511628211ull;
    }
  };
  std::int64_t dims[2] = {h.n_sites, h.local_dim};
  mix(dims, sizeof dims);
  for (const CMatrix& t : h.terms) mix(t.data(), sizeof(Complex) * static_cast<size_t>(t.size()));
  return x;
}

namespace {
constexpr char kMagic[8] = {'A', 'L', 'S', 'P', 'E', 'C', '0', '1'};
}

void save_spectral_data(const SpectralData& sd, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  std::int64_t header[4] = {sd.eigenvectors.rows(), sd.eigenvectors.cols(), sd.n_sites, sd.local_dim};
  double scalars[3] = {sd.ground_energy, sd.gap, sd.j_bound};
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(scalars), sizeof scalars);
  out.write(reinterpret_cast<const char*>(sd.energies.data()),
            static_cast<std::streamsize>(sizeof(double) * sd.energies.size()));
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = sd.eigenvectors;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(Complex) * rm.size()));
}

SpectralData load_spectral_data(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error("not a spectral cache file: " + path.string());
  std::int64_t header[4];
  double scalars[3];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(scalars), sizeof scalars);
  SpectralData sd;
  sd.n_sites = static_cast<int>(header[2]);
  sd.local_dim = static_cast<int>(header[3]);
  sd.ground_energy = scalars[0];
  sd.gap = scalars[1];
  sd.j_bound = scalars[2];
  sd.energies.resize(header[1]);
  in.read(reinterpret_cast<char*>(sd.energies.data()), static_cast<std::streamsize>(sizeof(double) * header[1]));
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(header[0], header[1]);
  in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(Complex) * rm.size()));
  if (!in) throw Error("truncated spectral cache file: " + path.string());
  sd.eigenvectors = rm;
  sd.complete = header[0] == header[1];
  return sd;
}

SpectralCache::SpectralCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

std::filesystem::path SpectralCache::path_for(const Hamiltonian1D& h) const {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.spec", static_cast<unsigned long long>(content_hash(h)));
  return directory_ / name;
}

SpectralData SpectralCache::get(const Hamiltonian1D& h, const DiagonalizationOptions& opts) {
  auto p = path_for(h);
  if (std::filesystem::exists(p)) {
    SpectralData sd = load_spectral_data(p);
    if (sd.n_sites == h.n_sites && sd.local_dim == h.local_dim &&
        (sd.complete || opts.mode == DiagonalizationMode::lowest_m))
      return sd;
  }
  SpectralData sd = diagonalize(h, opts);
  save_spectral_data(sd, p);
  return sd;
}

} // namespace arealaw
