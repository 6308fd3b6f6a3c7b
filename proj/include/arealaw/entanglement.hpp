#pragma once

#include <iosfwd>
#include <vector>

#include "arealaw/local_operator.hpp"

namespace arealaw {

// Schmidt decomposition across the bond between sites j and j+1.
struct CutData {
  int cut = 0;
  RVector coefficients; // descending, sum of squares 1
  CMatrix left_basis;   // columns: states on [1, j]
  CMatrix right_basis;  // columns: states on [j+1, N]

  RVector weights() const { return coefficients.array().square(); }
  double entropy() const;
  int rank(double tol = 1e-14) const;
  CVector reconstruct() const;
};

CMatrix reduced_density(const CVector& state, int n_sites, int local_dim, const Interval& x);

// Eigenvalues of the interval's reduced density matrix, descending. Uses the
// smaller side of the bipartition.
RVector interval_spectrum(const CVector& state, int n_sites, int local_dim, const Interval& x);

CutData schmidt_cut(const CVector& state, int n_sites, int local_dim, int j);

// Checks the spectrum of a density matrix and clips noise below zero.
RVector density_spectrum(const CMatrix& rho);
RVector clip_probabilities(RVector p);

double entropy_of(const RVector& p);
double renyi_of(const RVector& p, double alpha);

double von_neumann_entropy(const CMatrix& rho);
double renyi_entropy(const CMatrix& rho, double alpha);

// +infinity when supp(rho) is not inside supp(sigma).
double relative_entropy(const CMatrix& rho, const CMatrix& sigma);

double binary_relative_entropy(double p, double x);

struct MeasurementBound {
  double relative_entropy = 0.0;
  double p = 0.0;
  double x = 0.0;
  double classical = 0.0; // p ln(p/x) + (1-p) ln((1-p)/(1-x))
  double slack = 0.0;     // relative_entropy - classical
};

MeasurementBound lindblad_uhlmann_check(const CMatrix& rho, const CMatrix& sigma, const CMatrix& m);
MeasurementBound lindblad_uhlmann_from_values(double rel_entropy, double p, double x);

struct EntropyProfileRow {
  int cut = 0;
  double entropy = 0.0;
  std::vector<double> renyi;
  std::vector<double> top_coefficients;
};

std::vector<EntropyProfileRow> entropy_profile(const CVector& state, int n_sites, int local_dim,
                                               const std::vector<double>& alphas, int keep = 32);

// CSV: cut, S, S_alpha per alpha, then `keep` Schmidt coefficients (blank past the rank).
void write_entropy_profile_header(std::ostream& out, const std::vector<double>& alphas, int keep = 32);
void write_entropy_profile_row(std::ostream& out, const EntropyProfileRow& row, int keep = 32);

} // namespace arealaw
