#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "arealaw/local_operator.hpp"

namespace arealaw {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using RealSparseMatrix = Eigen::SparseMatrix<double>;

// H = sum_i H_{i,i+1}; terms[i-1] acts on sites (i, i+1).
struct Hamiltonian1D {
  int n_sites = 0;
  int local_dim = 0;
  std::vector<CMatrix> terms;
  double j_bound = 0.0;
  std::string family = "custom";
  std::map<std::string, double> params;

  Index dimension() const { return ipow(local_dim, n_sites); }
  int n_bonds() const { return static_cast<int>(terms.size()); }
  LocalOperator bond(int i) const; // 1-based
  bool is_real() const;

  CMatrix dense() const;
  CVector apply(const CVector& v) const;

  // sum over the listed bonds minus shift * identity
  SparseMatrix sparse(const std::vector<int>& bonds, double shift = 0.0) const;
  RealSparseMatrix sparse_real(const std::vector<int>& bonds, double shift = 0.0) const;
  std::vector<int> all_bonds() const;
};

enum class ModelFamily { transverse_ising, xxz, random_gapped, custom };

ModelFamily parse_family(const std::string& name);
std::string family_name(ModelFamily f);

using ModelParams = std::map<std::string, double>;

// transverse_ising: h (required), J (default 1).
//   H = -J sum Z_i Z_{i+1} - h sum X_i
// xxz: jz (required), jxy (default 1), h (default 0, longitudinal).
//   H = sum jxy (X X + Y Y) + jz Z Z + h sum Z_i
// random_gapped: seed (required), h (default 2), disorder (default 0.2).
//   transverse_ising at field h plus a random Hermitian bond term of norm <= disorder
// custom: terms supplied explicitly.
Hamiltonian1D build_model(ModelFamily family, int n_sites, const ModelParams& params,
                          std::vector<CMatrix> custom_terms = {});
Hamiltonian1D build_model(const std::string& family, int n_sites, const ModelParams& params,
                          std::vector<CMatrix> custom_terms = {});

// Validates shape and Hermiticity, fills j_bound.
Hamiltonian1D make_hamiltonian(int n_sites, int local_dim, std::vector<CMatrix> terms,
                               std::string family = "custom", ModelParams params = {});

Hamiltonian1D block_sites(const Hamiltonian1D& h, int block);

// Model files are key = value lines:
//   family = transverse_ising
//   n_sites = 10
//   local_dim = 2        (custom only)
//   h = 2.0              (any other key is a family parameter)
//   terms_file = t.txt   (custom only, relative to the model file)
//   terms_format = text | binary
Hamiltonian1D load_model_file(const std::filesystem::path& path);
void save_model_file(const Hamiltonian1D& h, const std::filesystem::path& path);

// Concatenated row-major (re, im) pairs, one D^2 x D^2 block per bond.
std::vector<CMatrix> read_terms(const std::filesystem::path& path, bool binary, int n_bonds, int local_dim);
void write_terms(const std::vector<CMatrix>& terms, const std::filesystem::path& path, bool binary);

} // namespace arealaw
