#pragma once

#include <iosfwd>
#include <vector>

#include "arealaw/spectral.hpp"

namespace arealaw {

struct CommutatorSample {
  double time = 0.0;
  int distance = 0;
  double norm = 0.0;
};

struct CommutatorProfile {
  std::vector<CommutatorSample> rows;
  double a_norm = 0.0;
  double b_norm = 0.0;
  int a_support = 1; // |X|
  bool overlapping = false;
};

// ||[A(t), B]|| on a time grid, A(t) = e^{iHt} A e^{-iHt}.
CommutatorProfile commutator_norm_profile(const SpectralData& sd, const LocalOperator& a,
                                          const LocalOperator& b, const std::vector<double>& times);
CommutatorProfile commutator_norm_profile(const Hamiltonian1D& h, const LocalOperator& a,
                                          const LocalOperator& b, const std::vector<double>& times);
// One A against several B, sharing the evolution.
CommutatorProfile lieb_robinson_scan(const SpectralData& sd, const LocalOperator& a,
                                     const std::vector<LocalOperator>& bs, const std::vector<double>& times);

struct FitOptions {
  double envelope_fraction = 0.1;
  double min_r_squared = 0.8;
  double floor = 1e-13; // norms below this are treated as zero
};

struct FitDiagnostics {
  double r_squared = 0.0;
  int points = 0;
  bool velocity_from_grid = false;
  std::vector<double> residuals;
};

struct LocalityConstants {
  double v = 0.0;
  double xi_c = 0.0;
  double xi = 0.0;
  double xi_prime = 0.0;
  double c = 0.0;
  FitDiagnostics diagnostics;
};

class FitError : public NumericalError {
public:
  FitError(const std::string& what, FitDiagnostics d) : NumericalError(what), diagnostics(std::move(d)) {}
  FitDiagnostics diagnostics;
};

// Ordinary least squares y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

LocalityConstants make_locality_constants(double v, double xi_c, double delta_e, double c = 1.0);
LocalityConstants fit_locality_constants(const CommutatorProfile& profile, double delta_e,
                                         const FitOptions& opts = {});

LocalOperator truncate_support(const CMatrix& a, int n_sites, int local_dim, const Interval& x);

void write_profile_csv(std::ostream& out, const CommutatorProfile& p);
void write_fit_report(std::ostream& out, const LocalityConstants& c);

} // namespace arealaw
