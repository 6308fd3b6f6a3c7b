#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "arealaw/entanglement.hpp"
#include "arealaw/errors.hpp"
#include "arealaw/locality.hpp"
#include "arealaw/mps.hpp"
#include "common.hpp"

using namespace arealaw;
using namespace arealaw::testing;

TEST(Mps, ProductAndGhzTruncation) {
  const CVector p = product_state(6);
  const auto m = state_to_mps(p, 6, 2, 1);
  EXPECT_NEAR(infidelity(m.contract(), p), 0.0, 1e-14);

  const CVector g = ghz(6);
  const auto exact = state_to_mps(g, 6, 2, 2);
  EXPECT_NEAR(infidelity(exact.contract(), g), 0.0, 1e-14);
  const auto cut = state_to_mps(g, 6, 2, 1);
  EXPECT_NEAR(infidelity(cut.contract(), g), 0.5, 1e-14);
  double sum = 0.0;
  for (double d : cut.discarded) sum += d;
  EXPECT_LE(infidelity(cut.contract(), g), sum + 1e-10);
}

TEST(Mps, TruncationErrorIdentityAndMonotoneInfidelity) {
  const CVector psi = diagonalize(tfim(10, 2.0)).ground_state();
  double prev = 2.0;
  for (int chi = 1; chi <= 16; ++chi) {
    const auto m = state_to_mps(psi, 10, 2, chi);
    double sum = 0.0;
    for (double d : m.discarded) sum += d;
    const double inf = infidelity(m.contract(), psi);
    EXPECT_LE(inf, sum + 1e-10);
    EXPECT_LE(inf, prev + 1e-12);
    EXPECT_LT(m.left_canonical_defect(), 1e-10);
    for (int b : m.bond_dims()) EXPECT_LE(b, chi);
    prev = inf;
  }
  EXPECT_LT(prev, 1e-8);
  EXPECT_THROW(state_to_mps(psi, 10, 2, 4, 0.0, 16), BudgetError);
}

TEST(Mps, SchmidtTailAndK0) {
  const CutData p = schmidt_cut(product_state(4), 4, 2, 2);
  EXPECT_NEAR(schmidt_tail(p, 1), 1.0, 1e-14);
  EXPECT_NEAR(schmidt_tail(p, 2), 0.0, 1e-14);
  EXPECT_NEAR(k0_from_entropy(0.0), 0.5, 1e-15);
  EXPECT_NEAR(k0_from_entropy(std::log(2.0)), 2.0, 1e-14);
  EXPECT_GE(k0_mass(p), 0.5);
  const CutData g = schmidt_cut(ghz(4), 4, 2, 2);
  EXPECT_NEAR(k0_from_entropy(g.entropy()), 2.0, 1e-12);
  EXPECT_NEAR(k0_mass(g), 1.0, 1e-14);

  const CVector psi = diagonalize(tfim(10, 2.0)).ground_state();
  const CutData c = schmidt_cut(psi, 10, 2, 5);
  EXPECT_GE(k0_mass(c), 0.5);
  const auto prof = schmidt_tail_profile(c, 2, k0_from_entropy(c.entropy()));
  for (std::size_t i = 1; i < prof.size(); ++i) EXPECT_LE(prof[i].tail, prof[i - 1].tail + 1e-15);
  for (const auto& t : prof) EXPECT_NEAR(t.tail, schmidt_tail(c, t.k_prime), 1e-15);
}

TEST(Expander, SmallestGraph) {
  const auto e = build_expander_mps(2, 3, 1);
  EXPECT_EQ(e.structure_error(), "");
  ASSERT_EQ(e.edges.size(), 3u);
  std::set<int> colors;
  for (const auto& ed : e.edges) {
    EXPECT_NE(ed.u, ed.v);
    colors.insert(ed.color);
  }
  EXPECT_EQ(colors.size(), 3u);
  for (int s = 0; s < 3; ++s) {
    const CMatrix a = e.tensor(s) * std::sqrt(3.0);
    // a swap: one unit entry per row and column
    EXPECT_NEAR(std::abs(a(0, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(a(1, 0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(a(0, 0)) + std::abs(a(1, 1)), 0.0, 1e-15);
  }
  const auto r = expander_interval_rdm(e, 6, {3, 3});
  EXPECT_FALSE(r.regime_ok);
  EXPECT_GT(r.deviation, 0.05);
}

TEST(Expander, Structure64) {
  const auto e = build_expander_mps(64, 3, 7);
  EXPECT_EQ(e.structure_error(), "");
  std::vector<std::vector<int>> colors(64);
  for (const auto& ed : e.edges) {
    colors[ed.u].push_back(ed.color);
    colors[ed.v].push_back(ed.color);
  }
  for (auto& c : colors) {
    std::sort(c.begin(), c.end());
    EXPECT_EQ(c, (std::vector<int>{0, 1, 2}));
  }
  std::ostringstream out;
  write_edge_list(out, e);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 96);
  EXPECT_EQ(text.substr(0, 11), "# k=64 d=3\n");
  EXPECT_THROW(build_expander_mps(64, 2, 7), ConfigError);
  EXPECT_THROW(build_expander_mps(7, 3, 7), ConfigError);
}

TEST(Expander, TransferRdmMatchesExplicitState) {
  const auto e = build_expander_mps(16, 3, 3, AmplitudeRule::signed_random);
  const CVector psi = expander_state(e, 6);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
  for (const Interval x : {Interval{3, 3}, Interval{3, 4}}) {
    const auto r = expander_interval_rdm(e, 6, x);
    EXPECT_LT((r.rho - reduced_density(psi, 6, 3, x)).norm(), 1e-12);
  }
  const CVector open = expander_state(e, 6, ExpanderBoundary::open);
  const auto ro = expander_interval_rdm(e, 6, {2, 3}, ExpanderBoundary::open);
  EXPECT_LT((ro.rho - reduced_density(open, 6, 3, {2, 3})).norm(), 1e-12);
}

TEST(Expander, SingleSiteMixing) {
  const auto e = build_expander_mps(64, 3, 7);
  const auto r1 = expander_interval_rdm(e, 10, {5, 5});
  EXPECT_TRUE(r1.regime_ok);
  EXPECT_LT(r1.deviation, 0.05);
  const auto r2 = expander_interval_rdm(e, 10, {5, 6});
  EXPECT_GT(r2.entropy, 0.0);
  EXPECT_LE(r2.entropy, 2.0 * std::log(3.0) + 1e-12);
}

TEST(Functional, TrivialCases) {
  const int n = 6, j = 3, l = 1;
  std::mt19937_64 rng(8);
  const CVector p = product_state(n);
  FarOperator a{random_matrix(4, 4, rng), random_matrix(4, 4, rng)};
  a.left /= linalg::operator_norm(a.left);
  a.right /= linalg::operator_norm(a.right);
  RVector w = RVector::Ones(schmidt_cut(p, n, 2, j).left_basis.cols());
  EXPECT_NEAR(fwdback_functional(p, n, 2, j, l, a, w), 0.0, 1e-14);
  const CVector psi = diagonalize(tfim(n, 1.0)).ground_state();
  const CutData cut = schmidt_cut(psi, n, 2, j);
  RVector signs = RVector::Ones(cut.coefficients.size());
  signs(1) = -1.0;
  EXPECT_NEAR(fwdback_functional(psi, n, 2, j, l, far_identity(n, 2, j, l), signs), 0.0, 1e-13);
  // window reaching the ends leaves nothing to probe
  EXPECT_NEAR(fwdback_functional(psi, n, 2, j, 3, far_identity(n, 2, j, 3), signs), 0.0, 1e-13);
}

TEST(Functional, MatchesDenseOracle) {
  const int n = 7, j = 3, l = 1;
  std::mt19937_64 rng(21);
  const CVector psi = diagonalize(tfim(n, 1.2)).ground_state();
  FarOperator a{random_matrix(4, 4, rng), random_matrix(8, 8, rng)};
  a.left /= linalg::operator_norm(a.left);
  a.right /= linalg::operator_norm(a.right);
  const CutData cut = schmidt_cut(psi, n, 2, j);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RVector w(cut.coefficients.size());
  for (Index i = 0; i < w.size(); ++i) w(i) = u(rng);

  const CMatrix a_dense = (LocalOperator(n, 2, {1, 2}, a.left).dense()) * LocalOperator(n, 2, {5, 7}, a.right).dense();
  CMatrix bl_left = CMatrix::Zero(8, 8);
  for (Index k = 0; k < w.size(); ++k) bl_left += w(k) * cut.left_basis.col(k) * cut.left_basis.col(k).adjoint();
  const CMatrix bl = LocalOperator(n, 2, {1, 3}, bl_left).dense();
  const Complex ab = psi.dot(a_dense * bl * psi), av = psi.dot(a_dense * psi), bv = psi.dot(bl * psi);
  const double oracle = (ab - av * bv).real();
  EXPECT_NEAR(fwdback_functional(psi, n, 2, j, l, a, w), oracle, 1e-12);
}

TEST(Functional, ProbeOnProductStateFindsNothing) {
  std::mt19937_64 rng(2);
  const auto rows = conjecture_probe(product_state(6), 6, 2, {1}, 3, 5, {2.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].max_functional, 0.0, 1e-12);
  EXPECT_NEAR(correlation_bound(0.0), 0.0, 1e-15);
  EXPECT_NEAR(correlation_bound(0.02), 3.0 * std::sqrt(0.04) + 0.02, 1e-15);
}

TEST(Functional, ProbeIsBoundedByTwoAndReproducible) {
  const CVector psi = diagonalize(tfim(8, 1.0)).ground_state();
  std::mt19937_64 r1(11), r2(11);
  const auto a = probe_functional(psi, 8, 2, 4, 1, r1);
  const auto b = probe_functional(psi, 8, 2, 4, 1, r2);
  EXPECT_EQ(a.value, b.value);
  EXPECT_LE(std::abs(a.value), 2.0);
  EXPECT_NEAR(fwdback_functional(psi, 8, 2, 4, 1, a.a, a.o_weights), a.value, 1e-12);
}
