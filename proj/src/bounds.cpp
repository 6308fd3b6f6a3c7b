#include "arealaw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "arealaw/errors.hpp"
#include "arealaw/io.hpp"

namespace arealaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

InequalityCheck at_least(std::string name, double measured, double formula, bool applicable = true,
                         bool exact = true) {
  return {std::move(name), formula, measured, measured - formula, applicable, exact};
}

InequalityCheck at_most(std::string name, double measured, double formula, bool applicable = true,
                        bool exact = true) {
  return {std::move(name), formula, measured, formula - measured, applicable, exact};
}

} // namespace

void BoundParameters::validate() const {
  if (!(xi > 0.0) || !(xi_prime > 0.0)) throw ConfigError("xi and xi' must be positive");
  if (d < 1) throw ConfigError("local dimension must be >= 1");
  if (!(c0 > 0.0) || !(c1 > 0.0)) throw ConfigError("c0 and C1 must be positive");
  if (!(j_coupling > 0.0) || !(delta_e > 0.0) || !(v > 0.0))
    throw ConfigError("J, gap and velocity must be positive");
}

BoundParameters bound_parameters(const LocalityConstants& lc, int d, double j_coupling, double delta_e,
                                 double c1) {
  BoundParameters p;
  p.xi = lc.xi;
  p.xi_prime = 6.0 * lc.xi;
  p.d = d;
  p.c1 = c1;
  p.j_coupling = j_coupling;
  p.delta_e = delta_e;
  p.v = lc.v;
  p.validate();
  return p;
}

double s_max(const BoundParameters& p) {
  p.validate();
  if (p.xi_prime <= 1.0) throw ConfigError("s_max needs xi' > 1");
  const double lnd = std::log(double(p.d));
  return p.c0 * p.xi_prime * std::log(p.xi_prime) * lnd * std::exp2(p.xi_prime * lnd);
}

double s_max_from_iteration(const BoundParameters& p) {
  const ClaimIteration it = claim_iteration(0.0, kInf, p, 0);
  return 3.0 * std::log(double(p.d)) * it.l0_formula;
}

double f_term(double xi_prime, int d) {
  if (d < 2) throw ConfigError("F(xi', D) needs D >= 2");
  if (!(xi_prime > 0.0)) throw ConfigError("xi' must be positive");
  const double lnd = std::log(double(d));
  return (xi_prime + 4.0) * lnd + 1.0 + std::log(double(d) * d - 1.0) + std::log(xi_prime / 2.0 + 1.0);
}

double bootstrap_bound(double k, double p_overlap, const BoundParameters& p) {
  p.validate();
  if (!(p_overlap > 0.0) || p_overlap > 1.0) throw ConfigError("overlap P must lie in (0, 1]");
  if (!(k >= 1.0)) throw ConfigError("rank k must be >= 1");
  return std::log(k) + p.xi_prime * std::log(2.0 * p.c1 * p.c1 / p_overlap) * std::log(double(p.d)) +
         f_term(p.xi_prime, p.d);
}

RenyiConvergence renyi_convergence_ok(double alpha, const BoundParameters& p) {
  p.validate();
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const double lnd = std::log(double(p.d));
  RenyiConvergence r;
  r.ratio = std::exp(-2.0 * alpha / p.xi_prime + 2.0 * (1.0 - alpha) * lnd);
  r.ok = r.ratio < 1.0;
  r.alpha_star = lnd / (lnd + 1.0 / p.xi_prime);
  return r;
}

ClaimIteration claim_iteration(double s_initial, double l_start, const BoundParameters& p, int max_steps) {
  p.validate();
  if (2.0 * p.c1 <= 1.0) throw ConfigError("claim iteration needs 2 C1 > 1");
  if (s_initial < 0.0) throw ConfigError("initial entropy bound must be non-negative");
  if (!(l_start > 0.0)) throw ConfigError("starting length must be positive");

  const double lnd = std::log(double(p.d));
  const double ln2c1 = std::log(2.0 * p.c1);
  ClaimIteration out;
  out.xi0 = 2.0 * p.xi_prime * ln2c1;
  out.exponent = p.xi_prime * lnd + (2.0 + p.c2) * p.xi_prime / out.xi0 + 0.5;
  out.l0_formula = p.xi_prime * ln2c1 * std::exp2(std::ceil(out.exponent));
  if (l_start < out.xi0) return out;

  double l = l_start;
  double s = s_initial;
  for (int n = 1; n <= max_steps; ++n) {
    s = 2.0 * s - (1.0 - 2.0 * p.c1 * std::exp(-l / p.xi_prime)) * l / p.xi_prime + std::log(p.c1) + p.c2;
    l *= 2.0;
    ClaimStep st;
    st.n = n;
    st.l = l;
    st.recursion = s;
    st.closed_form = lnd * l - l * std::floor(std::log2(l / out.xi0)) / p.xi_prime +
                     (2.0 + std::log(p.c1) + p.c2) * l / out.xi0;
    out.max_step_mismatch = std::max(out.max_step_mismatch, std::abs(st.recursion - st.closed_form));
    if (out.l0_closed_form == 0.0 && st.closed_form < 0.0) out.l0_closed_form = l;
    if (out.l0_recursion == 0.0 && st.recursion < 0.0) out.l0_recursion = l;
    out.steps.push_back(st);
    if (out.l0_closed_form > 0.0 && out.l0_recursion > 0.0) break;
  }
  return out;
}

double ChainReport::min_exact_slack() const {
  double m = kInf;
  for (const auto& c : checks)
    if (c.applicable && c.exact) m = std::min(m, c.slack);
  return m;
}

ChainReport xbd_chain_check(double p_overlap, double x, double y, double epsilon) {
  check_unit(p_overlap, "P");
  check_unit(x, "x");
  check_unit(y, "y");
  check_unit(epsilon, "epsilon");
  ChainReport r;
  const double cs = x * y - std::sqrt(x - x * x) * std::sqrt(y - y * y) - epsilon;
  r.checks.push_back(at_least("cauchy_schwarz", p_overlap, cs));

  const bool y_large = y >= 1.0 - 2.0 * epsilon;
  const double e2 = 2.0 * epsilon;
  const double linear = x * (1.0 - e2) - std::sqrt(x) * std::sqrt(e2) - epsilon;
  r.checks.push_back(at_least("cauchy_schwarz_y_bound", p_overlap, linear, y_large));

  const bool solvable = y_large && e2 < 1.0;
  double x_max = kInf, x_implicit = kInf;
  if (solvable) {
    const double u = (std::sqrt(e2) + std::sqrt(e2 + 4.0 * (1.0 - e2) * (epsilon + p_overlap))) / (2.0 * (1.0 - e2));
    x_max = u * u;
    x_implicit = (p_overlap + std::sqrt(x) * std::sqrt(e2) + e2) / (1.0 - e2);
  }
  r.checks.push_back(at_most("x_bound_quadratic", x, x_max, solvable));
  r.checks.push_back(at_most("x_bound_implicit", x, x_implicit, solvable));
  return r;
}

ChainReport relent_gap_check(double s_left, double s_right, double s_joint, double x, double epsilon, double c2) {
  check_unit(x, "x");
  check_unit(epsilon, "epsilon");
  ChainReport r;
  const double mi = s_left + s_right - s_joint;
  r.checks.push_back(at_least("mutual_information", mi, 0.0));

  const double p = 1.0 - 2.0 * epsilon;
  const bool ordered = p > 0.0 && x <= p;
  double lu = 0.0;
  if (ordered) lu = x > 0.0 ? xlogy(p, p / x) + (x < 1.0 ? xlogy(1.0 - p, (1.0 - p) / (1.0 - x)) : 0.0) : kInf;
  r.checks.push_back(at_least("lindblad_uhlmann", mi, lu, ordered));

  const bool finite = epsilon > 0.0;
  const double form = finite ? p * std::log(1.0 / epsilon) - c2 : kInf;
  r.checks.push_back(at_least("relent_c2_form", mi, form, finite, false));
  return r;
}

ChainReport entropy_profile_check(const std::vector<double>& s, double s_max_value, int d) {
  if (d < 2) throw ConfigError("entropy profile check needs D >= 2");
  const double lnd = std::log(double(d));
  ChainReport r;
  // cuts 1..N-1 with S = 0 at both ends
  double worst = 0.0;
  double prev = 0.0;
  for (double v : s) {
    worst = std::max(worst, std::abs(v - prev));
    prev = v;
  }
  if (!s.empty()) worst = std::max(worst, std::abs(s.back()));
  r.checks.push_back(at_most("entropy_increment", worst, lnd));

  int first = -1;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > s_max_value) {
      first = static_cast<int>(i);
      break;
    }
  const double s_cut = 2.0 * s_max_value / 3.0;
  if (first < 0) {
    r.checks.push_back(at_least("plateau_implication", 0.0, 0.0, false));
  } else {
    const double l0 = s_max_value / (3.0 * lnd);
    double lowest = kInf;
    for (std::size_t k = first; k < s.size() && k <= first + l0; ++k) lowest = std::min(lowest, s[k]);
    r.checks.push_back(at_least("plateau_implication", lowest, s_cut));
  }
  return r;
}

ChainReport subadditivity_check(const std::vector<double>& s) {
  ChainReport r;
  for (std::size_t l = 1; 2 * l <= s.size(); ++l)
    r.checks.push_back(at_most("subadditivity_l" + std::to_string(l), s[2 * l - 1], 2.0 * s[l - 1]));
  return r;
}

LineFit fit_c1(const std::vector<double>& l, const std::vector<double>& epsilon) {
  std::vector<double> y;
  for (double e : epsilon) {
    if (!(e > 0.0)) throw NumericalError("fit_c1: epsilon must be positive");
    y.push_back(std::log(e));
  }
  return fit_line(l, y);
}

void write_bounds_header(std::ostream& out) {
  io::write_row(out, {"context", "quantity", "formula_value", "measured_value", "slack", "applicable", "exact"});
}

void write_bounds_rows(std::ostream& out, const ChainReport& r, const std::string& context) {
  for (const auto& c : r.checks)
    io::write_row(out, {context, c.name, io::num(c.formula), io::num(c.measured), io::num(c.slack),
                        c.applicable ? "1" : "0", c.exact ? "1" : "0"});
}

} // namespace arealaw
