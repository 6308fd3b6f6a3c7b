#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "arealaw/bounds.hpp"
#include "arealaw/errors.hpp"

using namespace arealaw;

namespace {

BoundParameters params(double xi_prime, int d, double c0 = 1.0, double c1 = 1.0, double c2 = 1.0) {
  BoundParameters p;
  p.xi_prime = xi_prime;
  p.d = d;
  p.c0 = c0;
  p.c1 = c1;
  p.c2 = c2;
  return p;
}

const InequalityCheck& find(const ChainReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

} // namespace

TEST(Bounds, SMaxHandValue) {
  // xi' = e with a ln(D) = 1 stand-in: e * 1 * 1 * 2^e
  BoundParameters p = params(std::exp(1.0), 3);
  const double lnd = std::log(3.0);
  const double expected = std::exp(1.0) * 1.0 * lnd * std::exp2(std::exp(1.0) * lnd);
  EXPECT_NEAR(s_max(p), expected, 1e-12 * expected);
  // the unit-log case evaluated directly
  EXPECT_NEAR(std::exp(1.0) * std::exp2(std::exp(1.0)), 17.8887, 1e-4);
  EXPECT_EQ(s_max(params(6.0, 1)), 0.0);
  EXPECT_THROW(s_max(params(1.0, 2)), ConfigError);
  EXPECT_LT(s_max(params(3.0, 2)), s_max(params(4.0, 2)));
  EXPECT_LT(s_max(params(3.0, 2)), s_max(params(3.0, 3)));
}

TEST(Bounds, FTermAndBootstrap) {
  EXPECT_NEAR(f_term(2.0, 2), 6.9506, 1e-4);
  EXPECT_THROW(f_term(2.0, 1), ConfigError);
  // ln(2 C1^2 / P) = 0 leaves ln k + F
  BoundParameters p = params(2.0, 2, 1.0, std::sqrt(0.5));
  EXPECT_NEAR(bootstrap_bound(1.0, 1.0, p), f_term(2.0, 2), 1e-12);
  EXPECT_NEAR(bootstrap_bound(4.0, 1.0, p), std::log(4.0) + f_term(2.0, 2), 1e-12);
  EXPECT_GT(bootstrap_bound(1.0, 0.5, p), bootstrap_bound(1.0, 1.0, p));
  EXPECT_THROW(bootstrap_bound(1.0, 0.0, p), ConfigError);
  EXPECT_THROW(bootstrap_bound(0.5, 1.0, p), ConfigError);
}

TEST(Bounds, RenyiThreshold) {
  const BoundParameters p = params(6.0, 2);
  const auto r = renyi_convergence_ok(1.0, p);
  EXPECT_NEAR(r.alpha_star, std::log(2.0) / (std::log(2.0) + 1.0 / 6.0), 1e-15);
  EXPECT_NEAR(r.alpha_star, 0.806, 1e-3);
  EXPECT_TRUE(r.ok);
  EXPECT_FALSE(renyi_convergence_ok(0.05, p).ok);
  EXPECT_TRUE(renyi_convergence_ok(r.alpha_star + 1e-6, p).ok);
  EXPECT_FALSE(renyi_convergence_ok(r.alpha_star - 1e-6, p).ok);
  EXPECT_THROW(renyi_convergence_ok(0.0, p), ConfigError);
}

TEST(Bounds, ClaimIteration) {
  const double c1 = std::exp(1.0) / 2.0;
  BoundParameters p = params(1.0, 1, 1.0, c1, 1.0);
  const auto early = claim_iteration(0.0, 1.0, p);
  EXPECT_NEAR(early.xi0, 2.0, 1e-15);
  EXPECT_TRUE(early.steps.empty());
  EXPECT_NEAR(early.exponent, 2.0, 1e-15);
  EXPECT_NEAR(early.l0_formula, 4.0, 1e-15);

  const auto it = claim_iteration(0.0, 2.0, p);
  ASSERT_FALSE(it.steps.empty());
  // one doubling step by hand
  const double s1 = -(1.0 - 2.0 * c1 * std::exp(-2.0)) * 2.0 + std::log(c1) + 1.0;
  EXPECT_NEAR(it.steps[0].recursion, s1, 1e-14);
  EXPECT_NEAR(it.steps[0].l, 4.0, 0.0);
  // closed form at l: -l floor(log2(l / 2)) + (3 + ln C1) l / 2
  for (const auto& st : it.steps)
    EXPECT_NEAR(st.closed_form, -st.l * std::floor(std::log2(st.l / 2.0)) + (3.0 + std::log(c1)) * st.l / 2.0,
                1e-12);
  EXPECT_EQ(it.l0_closed_form, 8.0);
  EXPECT_GT(it.l0_recursion, 0.0);
  for (std::size_t i = 1; i < it.steps.size(); ++i) EXPECT_EQ(it.steps[i].l, 2.0 * it.steps[i - 1].l);

  EXPECT_THROW(claim_iteration(0.0, 2.0, params(1.0, 2, 1.0, 0.5)), ConfigError);
  EXPECT_THROW(claim_iteration(-1.0, 2.0, p), ConfigError);
}

TEST(Bounds, XbdChain) {
  const auto tight = xbd_chain_check(1.0, 1.0, 1.0, 0.0);
  EXPECT_NEAR(find(tight, "cauchy_schwarz").slack, 0.0, 1e-15);
  EXPECT_NEAR(tight.min_exact_slack(), 0.0, 1e-15);
  const auto r = xbd_chain_check(0.3, 0.4, 0.95, 0.05);
  EXPECT_TRUE(find(r, "cauchy_schwarz_y_bound").applicable);
  EXPECT_GE(find(r, "x_bound_quadratic").slack, 0.0);
  const auto small_y = xbd_chain_check(0.3, 0.4, 0.5, 0.05);
  EXPECT_FALSE(find(small_y, "cauchy_schwarz_y_bound").applicable);
  EXPECT_FALSE(find(small_y, "x_bound_quadratic").applicable);
  // P below the Cauchy-Schwarz floor is reported as a violation
  EXPECT_LT(find(xbd_chain_check(0.1, 0.9, 0.9, 0.0), "cauchy_schwarz").slack, 0.0);
  EXPECT_THROW(xbd_chain_check(1.5, 0.5, 0.5, 0.0), ConfigError);
}

TEST(Bounds, RelativeEntropyGap) {
  const double ln2 = std::log(2.0);
  const auto bell = relent_gap_check(ln2, ln2, 0.0, 0.25, 0.0);
  EXPECT_NEAR(find(bell, "mutual_information").measured, 2.0 * ln2, 1e-15);
  EXPECT_NEAR(find(bell, "lindblad_uhlmann").slack, 0.0, 1e-14);
  EXPECT_FALSE(find(bell, "relent_c2_form").applicable);
  const auto product = relent_gap_check(0.0, 0.0, 0.0, 1.0, 0.0);
  EXPECT_NEAR(product.min_exact_slack(), 0.0, 1e-15);
  const auto noisy = relent_gap_check(ln2, ln2, 0.0, 0.25, 0.01);
  EXPECT_GT(find(noisy, "lindblad_uhlmann").slack, 0.0);
  EXPECT_FALSE(find(noisy, "relent_c2_form").exact);
}

TEST(Bounds, EntropyProfileAndSubadditivity) {
  const double ln2 = std::log(2.0);
  const auto flat = entropy_profile_check({ln2, ln2, ln2}, 10.0, 2);
  EXPECT_NEAR(find(flat, "entropy_increment").slack, 0.0, 1e-15);
  EXPECT_FALSE(find(flat, "plateau_implication").applicable);
  const auto jump = entropy_profile_check({0.1, 0.9}, 10.0, 2);
  EXPECT_LT(find(jump, "entropy_increment").slack, 0.0);
  const auto plateau = entropy_profile_check({0.5, 1.0, 1.2, 1.1, 0.6}, 0.9, 2);
  EXPECT_TRUE(find(plateau, "plateau_implication").applicable);
  EXPECT_NEAR(find(plateau, "plateau_implication").slack, 1.0 - 0.6, 1e-15);

  const auto sub = subadditivity_check({1.0, 1.5, 2.0, 2.5});
  ASSERT_EQ(sub.checks.size(), 2u);
  EXPECT_NEAR(sub.checks[0].slack, 0.5, 1e-15);
  EXPECT_NEAR(sub.checks[1].slack, 0.5, 1e-15);
  EXPECT_LT(subadditivity_check({1.0, 2.5}).min_exact_slack(), 0.0);
}

TEST(Bounds, FitC1AndWriter) {
  std::vector<double> l{2, 4, 6, 8}, eps;
  for (double x : l) eps.push_back(0.8 * std::exp(-x / 3.0));
  const auto f = fit_c1(l, eps);
  EXPECT_NEAR(f.slope, -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 0.8, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_THROW(fit_c1({1, 2}, {0.5, 0.0}), NumericalError);

  std::ostringstream out;
  write_bounds_header(out);
  write_bounds_rows(out, subadditivity_check({1.0, 1.5}), "ctx");
  EXPECT_EQ(out.str().substr(0, 8), "context,");
  EXPECT_NE(out.str().find("ctx,subadditivity_l1,"), std::string::npos);
}
