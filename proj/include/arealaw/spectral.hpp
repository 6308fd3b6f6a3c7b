#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "arealaw/lattice_model.hpp"
#include "arealaw/quadrature.hpp"

namespace arealaw {

enum class DiagonalizationMode { full, lowest_m };

struct DiagonalizationOptions {
  DiagonalizationMode mode = DiagonalizationMode::full;
  int lowest_count = 2;
  Index max_full_dimension = Index(1) << 14;
  Index max_sparse_dimension = Index(1) << 22;
  int max_lanczos_iterations = 400;
  double degeneracy_tolerance = 1e-8; // relative to J
  double residual_tolerance = 1e-9;   // relative to ||H||
};

// Energies are shifted so the ground energy is zero; `ground_energy` keeps
// the original value.
struct SpectralData {
  int n_sites = 0;
  int local_dim = 0;
  double j_bound = 0.0;
  double ground_energy = 0.0;
  double gap = 0.0;
  bool complete = false;
  RVector energies;
  CMatrix eigenvectors;

  Index dimension() const { return eigenvectors.rows(); }
  CVector ground_state() const { return eigenvectors.col(0); }
  CMatrix ground_projector() const;
};

SpectralData diagonalize(const Hamiltonian1D& h, const DiagonalizationOptions& opts = {});

// Residual max_k ||H v_k - E_k v_k|| over the returned pairs.
double max_residual(const Hamiltonian1D& h, const SpectralData& sd);

CMatrix to_eigenbasis(const SpectralData& sd, const CMatrix& a);
CMatrix from_eigenbasis(const SpectralData& sd, const CMatrix& a);

// e^{iHt} A e^{-iHt}
CMatrix evolve(const SpectralData& sd, const CMatrix& a, double t);

// A_mn exp(-q (E_m - E_n)^2 / (2 gap^2)) in the eigenbasis.
CMatrix gaussian_filter_operator(const SpectralData& sd, const CMatrix& a, double q);
// Same, for an operator already expressed in the eigenbasis; result stays there.
CMatrix gaussian_filter_eigenbasis(const SpectralData& sd, CMatrix a_eig, double q);
// Eigenvalues exp(-q E_n^2 / (2 gap^2)).
CMatrix gaussian_filter_projector(const SpectralData& sd, double q);

// Time-domain versions: sum_k w_k U_k A U_k^dagger with U_k = exp(i (H - E0) t_k)
// from a dense matrix exponential, independent of the eigenbasis.
CMatrix quadrature_filter_operator(const Hamiltonian1D& h, const SpectralData& sd, const CMatrix& a,
                                   double q, const QuadratureRule& rule);
CMatrix quadrature_filter_projector(const Hamiltonian1D& h, const SpectralData& sd, double q,
                                    const QuadratureRule& rule);

std::uint64_t content_hash(const Hamiltonian1D& h);

// Binary container: magic "ALSPEC01", then int64 rows, cols, n_sites,
// local_dim, double ground_energy, gap, j_bound, energies, and the
// eigenvector matrix as row-major (re, im) pairs.
void save_spectral_data(const SpectralData& sd, const std::filesystem::path& path);
SpectralData load_spectral_data(const std::filesystem::path& path);

class SpectralCache {
public:
  explicit SpectralCache(std::filesystem::path directory);
  SpectralData get(const Hamiltonian1D& h, const DiagonalizationOptions& opts = {});
  std::filesystem::path path_for(const Hamiltonian1D& h) const;

private:
  std::filesystem::path directory_;
};

} // namespace arealaw
