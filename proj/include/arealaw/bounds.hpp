#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arealaw/locality.hpp"

namespace arealaw {

struct BoundParameters {
  double xi = 1.0;
  double xi_prime = 6.0;
  int d = 2;
  double c0 = 1.0;
  double c1 = 1.0; // C_1(xi)
  double c2 = 1.0;
  double j_coupling = 1.0;
  double delta_e = 1.0;
  double v = 1.0;

  void validate() const;
};

BoundParameters bound_parameters(const LocalityConstants& lc, int d, double j_coupling, double delta_e,
                                 double c1 = 1.0);

// c0 xi' ln(xi') ln(D) 2^{xi' ln D}
double s_max(const BoundParameters& p);
// 3 ln(D) times the iteration length bound; the second form of the ceiling.
double s_max_from_iteration(const BoundParameters& p);

double f_term(double xi_prime, int d);
double bootstrap_bound(double k, double p_overlap, const BoundParameters& p);

struct RenyiConvergence {
  bool ok = false;
  double alpha_star = 0.0;
  double ratio = 0.0; // exp(-2 alpha / xi') D^{2(1 - alpha)}
};
RenyiConvergence renyi_convergence_ok(double alpha, const BoundParameters& p);

struct ClaimStep {
  int n = 0;
  double l = 0.0;
  double recursion = 0.0;   // iterated doubling inequality
  double closed_form = 0.0; // ln(D) l - l floor(log2(l/xi0))/xi' + (2 + ln C1 + C2) l / xi0
};

struct ClaimIteration {
  double xi0 = 0.0;
  double exponent = 0.0;   // xi' ln D + (2 + C2) xi'/xi0 + 1/2
  double l0_formula = 0.0; // xi' ln(2 C1) 2^{ceil(exponent)}
  double l0_closed_form = 0.0; // first emitted l with negative closed form (0 if none)
  double l0_recursion = 0.0;   // first emitted l with negative recursion value (0 if none)
  double max_step_mismatch = 0.0;
  std::vector<ClaimStep> steps;
};

// Doubles l from l_start while either sequence is non-negative; empty when l_start < xi0.
ClaimIteration claim_iteration(double s_initial, double l_start, const BoundParameters& p, int max_steps = 64);

struct InequalityCheck {
  std::string name;
  double formula = 0.0;  // right-hand side
  double measured = 0.0; // left-hand side
  double slack = 0.0;    // measured - formula for ">=", formula - measured for "<="
  bool applicable = true;
  bool exact = true; // holds as a theorem (false for constant-dependent forms)
};

struct ChainReport {
  std::vector<InequalityCheck> checks;
  double min_exact_slack() const;
};

// P >= xy - sqrt(x - x^2) sqrt(y - y^2) - eps, its y >= 1 - 2 eps specialization and the
// resulting bounds on x.
ChainReport xbd_chain_check(double p_overlap, double x, double y, double epsilon);

// Mutual information against the binary relative entropy bound and the C2 form.
ChainReport relent_gap_check(double s_left, double s_right, double s_joint, double x, double epsilon,
                             double c2 = 1.0);

// Per-site entropy increments and the "one large cut forces a plateau" implication.
ChainReport entropy_profile_check(const std::vector<double>& cut_entropies, double s_max_value, int d);

// S_{2l} <= 2 S_l with S_l the largest interval entropy of length l.
ChainReport subadditivity_check(const std::vector<double>& max_interval_entropy);

// ln eps = ln C1 - l / xi' fitted on an AGSP sweep.
LineFit fit_c1(const std::vector<double>& l, const std::vector<double>& epsilon);

void write_bounds_header(std::ostream& out);
void write_bounds_rows(std::ostream& out, const ChainReport& r, const std::string& context);

} // namespace arealaw
