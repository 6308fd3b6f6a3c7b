#include "arealaw/lattice_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace arealaw {

LocalOperator Hamiltonian1D::bond(int i) const {
  if (i < 1 || i > n_bonds()) throw ConfigError("bond index out of range");
  return LocalOperator(n_sites, local_dim, {i, i + 1}, terms[i - 1]);
}

bool Hamiltonian1D::is_real() const {
  return std::all_of(terms.begin(), terms.end(), [](const CMatrix& t) { return linalg::is_real(t); });
}

std::vector<int> Hamiltonian1D::all_bonds() const {
  std::vector<int> b(n_bonds());
  for (int i = 0; i < n_bonds(); ++i) b[i] = i + 1;
  return b;
}

CMatrix Hamiltonian1D::dense() const {
  const Index n = dimension();
  CMatrix out = CMatrix::Zero(n, n);
  for (int i = 1; i <= n_bonds(); ++i) bond(i).add_to(out);
  return out;
}

CVector Hamiltonian1D::apply(const CVector& v) const {
  CVector w = CVector::Zero(v.size());
  for (int i = 1; i <= n_bonds(); ++i) w += bond(i).apply(v);
  return w;
}

namespace {

template <class Scalar, class Convert>
Eigen::SparseMatrix<Scalar> build_sparse(const Hamiltonian1D& h, const std::vector<int>& bonds,
                                         double shift, Convert convert) {
  const Index n = h.dimension();
  const int d2 = h.local_dim * h.local_dim;
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<size_t>(n) * (bonds.size() * d2 + 1));
  for (int b : bonds) {
    if (b < 1 || b > h.n_bonds()) throw ConfigError("bond index out of range");
    const CMatrix& t = h.terms[b - 1];
    kernels::Split s = split_for({b, b + 1}, h.n_sites, h.local_dim);
    for (Index l = 0; l < s.left; ++l)
      for (Index r = 0; r < s.right; ++r)
        for (int m = 0; m < d2; ++m)
          for (int mp = 0; mp < d2; ++mp)
            if (t(m, mp) != Complex(0.0))
              trips.emplace_back((l * d2 + m) * s.right + r, (l * d2 + mp) * s.right + r, convert(t(m, mp)));
  }
  if (shift != 0.0)
    for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, convert(Complex(-shift)));
  Eigen::SparseMatrix<Scalar> out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

} // namespace

SparseMatrix Hamiltonian1D::sparse(const std::vector<int>& bonds, double shift) const {
  return build_sparse<Complex>(*this, bonds, shift, [](Complex c) { return c; });
}

RealSparseMatrix Hamiltonian1D::sparse_real(const std::vector<int>& bonds, double shift) const {
  if (!is_real()) throw ConfigError("sparse_real: Hamiltonian has complex terms");
  return build_sparse<double>(*this, bonds, shift, [](Complex c) { return c.real(); });
}

ModelFamily parse_family(const std::string& name) {
  if (name == "transverse_ising") return ModelFamily::transverse_ising;
  if (name == "xxz") return ModelFamily::xxz;
  if (name == "random_gapped") return ModelFamily::random_gapped;
  if (name == "custom") return ModelFamily::custom;
  throw ConfigError("unknown model family: " + name);
}

std::string family_name(ModelFamily f) {
  switch (f) {
  case ModelFamily::transverse_ising: return "transverse_ising";
  case ModelFamily::xxz: return "xxz";
  case ModelFamily::random_gapped: return "random_gapped";
  case ModelFamily::custom: return "custom";
  }
  return "custom";
}

Hamiltonian1D make_hamiltonian(int n_sites, int local_dim, std::vector<CMatrix> terms,
                               std::string family, ModelParams params) {
  if (n_sites < 1) throw ConfigError("n_sites must be positive");
  if (local_dim < 1) throw ConfigError("local_dim must be positive");
  if (static_cast<int>(terms.size()) != n_sites - 1)
    throw ConfigError("expected " + std::to_string(n_sites - 1) + " bond terms, got " +
                      std::to_string(terms.size()));
  const Index d2 = Index(local_dim) * local_dim;
  double j = 0.0;
  for (size_t i = 0; i < terms.size(); ++i) {
    CMatrix& t = terms[i];
    if (t.rows() != d2 || t.cols() != d2)
      throw ConfigError("bond term " + std::to_string(i + 1) + " has wrong dimension");
    if (linalg::hermitian_deviation(t) > 1e-12)
      throw ConfigError("bond term " + std::to_string(i + 1) + " is not Hermitian");
    t = linalg::hermitian_part(t);
    j = std::max(j, linalg::hermitian_norm(t));
  }
  Hamiltonian1D h;
  h.n_sites = n_sites;
  h.local_dim = local_dim;
  h.terms = std::move(terms);
  h.j_bound = j;
  h.family = std::move(family);
  h.params = std::move(params);
  return h;
}

namespace {

double require(const ModelParams& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ConfigError("missing parameter: " + key);
  return it->second;
}

double optional(const ModelParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

// Weight of a single-site field on the left / right site of bond i.
double left_share(int i, int) { return i == 1 ? 1.0 : 0.5; }
double right_share(int i, int n_sites) { return i == n_sites - 1 ? 1.0 : 0.5; }

std::vector<CMatrix> ising_terms(int n, double j, double h) {
  using namespace linalg;
  const CMatrix id = identity(2);
  std::vector<CMatrix> terms;
  for (int i = 1; i < n; ++i) {
    CMatrix t = -j * kron(pauli::z(), pauli::z()) - h * left_share(i, n) * kron(pauli::x(), id) -
                h * right_share(i, n) * kron(id, pauli::x());
    terms.push_back(t);
  }
  return terms;
}

} // namespace

Hamiltonian1D build_model(ModelFamily family, int n_sites, const ModelParams& params,
                          std::vector<CMatrix> custom_terms) {
  using namespace linalg;
  if (n_sites < 2) throw ConfigError("n_sites must be at least 2");
  const CMatrix id = identity(2);
  switch (family) {
  case ModelFamily::transverse_ising: {
    double h = require(params, "h");
    double j = optional(params, "J", 1.0);
    return make_hamiltonian(n_sites, 2, ising_terms(n_sites, j, h), family_name(family), params);
  }
  case ModelFamily::xxz: {
    double jz = require(params, "jz");
    double jxy = optional(params, "jxy", 1.0);
    double h = optional(params, "h", 0.0);
    std::vector<CMatrix> terms;
    for (int i = 1; i < n_sites; ++i) {
      CMatrix t = jxy * (kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y())) +
                  jz * kron(pauli::z(), pauli::z()) + h * left_share(i, n_sites) * kron(pauli::z(), id) +
                  h * right_share(i, n_sites) * kron(id, pauli::z());
      terms.push_back(t);
    }
    return make_hamiltonian(n_sites, 2, std::move(terms), family_name(family), params);
  }
  case ModelFamily::random_gapped: {
    auto seed = static_cast<std::uint64_t>(require(params, "seed"));
    double h = optional(params, "h", 2.0);
    double disorder = optional(params, "disorder", 0.2);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<CMatrix> terms = ising_terms(n_sites, 1.0, h);
    for (CMatrix& t : terms) {
      CMatrix r(4, 4);
      for (Index k = 0; k < r.size(); ++k) r(k) = Complex(g(rng), g(rng));
      CMatrix herm = hermitian_part(r);
      double nrm = hermitian_norm(herm);
      if (nrm > 0.0) t += (disorder / nrm) * herm;
    }
    return make_hamiltonian(n_sites, 2, std::move(terms), family_name(family), params);
  }
  case ModelFamily::custom: {
    if (custom_terms.empty()) throw ConfigError("custom model needs explicit terms");
    const Index d2 = custom_terms.front().rows();
    int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
    if (Index(d) * d != d2) throw ConfigError("custom term dimension is not a square");
    return make_hamiltonian(n_sites, d, std::move(custom_terms), family_name(family), params);
  }
  }
  throw ConfigError("unknown model family");
}

Hamiltonian1D build_model(const std::string& family, int n_sites, const ModelParams& params,
                          std::vector<CMatrix> custom_terms) {
  return build_model(parse_family(family), n_sites, params, std::move(custom_terms));
}

Hamiltonian1D block_sites(const Hamiltonian1D& h, int block) {
  if (block < 1) throw ConfigError("block size must be positive");
  if (h.n_sites % block != 0)
    throw ConfigError("block size " + std::to_string(block) + " does not divide " + std::to_string(h.n_sites));
  if (block == 1) return h;
  const int nb = h.n_sites / block;
  if (nb < 2) throw ConfigError("blocking must leave at least two sites");
  std::vector<CMatrix> terms;
  for (int k = 1; k < nb; ++k) {
    // Pair of blocks k, k+1 covers original sites [(k-1)b+1, (k+1)b].
    const int first = (k - 1) * block + 1;
    const int width = 2 * block;
    std::vector<int> bonds;
    for (int i = first; i < k * block; ++i) bonds.push_back(i);
    bonds.push_back(k * block);
    if (k == nb - 1)
      for (int i = k * block + 1; i < (k + 1) * block; ++i) bonds.push_back(i);
    const Index dim = ipow(h.local_dim, width);
    CMatrix t = CMatrix::Zero(dim, dim);
    for (int b : bonds) {
      LocalOperator op(width, h.local_dim, {b - first + 1, b - first + 2}, h.terms[b - 1]);
      op.add_to(t);
    }
    terms.push_back(std::move(t));
  }
  Hamiltonian1D out = make_hamiltonian(nb, static_cast<int>(ipow(h.local_dim, block)), std::move(terms),
                                       h.family, h.params);
  return out;
}

std::vector<CMatrix> read_terms(const std::filesystem::path& path, bool binary, int n_bonds, int local_dim) {
  const Index d2 = Index(local_dim) * local_dim;
  const Index count = d2 * d2 * n_bonds;
  std::vector<double> raw(static_cast<size_t>(2 * count));
  if (binary) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open terms file " + path.string());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(double)))
      throw ConfigError("terms file too short: " + path.string());
  } else {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open terms file " + path.string());
    for (double& x : raw)
      if (!(in >> x)) throw ConfigError("terms file too short: " + path.string());
  }
  std::vector<CMatrix> terms;
  size_t k = 0;
  for (int b = 0; b < n_bonds; ++b) {
    CMatrix t(d2, d2);
    for (Index r = 0; r < d2; ++r)
      for (Index c = 0; c < d2; ++c, k += 2) t(r, c) = Complex(raw[k], raw[k + 1]);
    terms.push_back(std::move(t));
  }
  return terms;
}

void write_terms(const std::vector<CMatrix>& terms, const std::filesystem::path& path, bool binary) {
  std::vector<double> raw;
  for (const CMatrix& t : terms)
    for (Index r = 0; r < t.rows(); ++r)
      for (Index c = 0; c < t.cols(); ++c) {
        raw.push_back(t(r, c).real());
        raw.push_back(t(r, c).imag());
      }
  if (binary) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
  } else {
    std::ofstream out(path);
    out.precision(17);
    for (size_t i = 0; i < raw.size(); i += 2) out << raw[i] << ' ' << raw[i + 1] << '\n';
  }
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

Hamiltonian1D load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model file line without '=': " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (!kv.count("family")) throw ConfigError("model file has no family");
  if (!kv.count("n_sites")) throw ConfigError("model file has no n_sites");
  const std::string family = kv["family"];
  const int n = std::stoi(kv["n_sites"]);
  ModelParams params;
  for (const auto& [k, v] : kv) {
    if (k == "family" || k == "n_sites" || k == "local_dim" || k == "terms_file" || k == "terms_format") continue;
    try {
      params[k] = std::stod(v);
    } catch (const std::exception&) {
      throw ConfigError("model parameter " + k + " is not a number");
    }
  }
  if (parse_family(family) == ModelFamily::custom) {
    if (!kv.count("terms_file") || !kv.count("local_dim"))
      throw ConfigError("custom model needs terms_file and local_dim");
    bool binary = kv.count("terms_format") && kv["terms_format"] == "binary";
    auto terms = read_terms(path.parent_path() / kv["terms_file"], binary, n - 1, std::stoi(kv["local_dim"]));
    return build_model(ModelFamily::custom, n, params, std::move(terms));
  }
  return build_model(family, n, params);
}

void save_model_file(const Hamiltonian1D& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "family = " << h.family << "\n";
  out << "n_sites = " << h.n_sites << "\n";
  if (h.family == "custom") {
    auto terms_path = path;
    terms_path.replace_extension(".terms");
    write_terms(h.terms, terms_path, false);
    out << "local_dim = " << h.local_dim << "\n";
    out << "terms_file = " << terms_path.filename().string() << "\n";
    out << "terms_format = text\n";
  }
  for (const auto& [k, v] : h.params) out << k << " = " << v << "\n";
}

} // namespace arealaw
