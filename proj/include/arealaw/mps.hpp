#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "arealaw/entanglement.hpp"

namespace arealaw {

enum class CanonicalForm { none, left, right };

struct MatrixProductState {
  int n_sites = 0;
  int local_dim = 2;
  // tensors[i][s] is chi_i x chi_{i+1}; chi_0 = chi_N = 1.
  std::vector<std::vector<CMatrix>> tensors;
  CanonicalForm form = CanonicalForm::none;
  std::vector<double> discarded; // per cut j = 1..N-1

  std::vector<int> bond_dims() const;
  CVector contract() const;
  // max over sites of ||sum_s A(s)^dagger A(s) - 1||, last site excluded.
  double left_canonical_defect() const;
};

MatrixProductState state_to_mps(const CVector& state, int n_sites, int local_dim, int max_bond,
                                double cut_tolerance = 0.0, Index budget = Index(1) << 22);

// 1 - |<phi|psi>|^2 / (|phi|^2 |psi|^2)
double infidelity(const CVector& phi, const CVector& psi);

// sum_{alpha >= k'} |A_0(alpha)|^2, alpha 1-based.
double schmidt_tail(const CutData& cut, int k_prime);
double k0_from_entropy(double s);
// Weight of the top ceil(k0) Schmidt values.
double k0_mass(const CutData& cut);

struct TailPoint {
  int m = 0;       // floor(log_D(k'/k0))
  int k_prime = 0; // smallest k' with that m
  double tail = 0.0;
};
// One point per m >= 0 until the tail drops below floor or k' exceeds the Schmidt rank.
std::vector<TailPoint> schmidt_tail_profile(const CutData& cut, int local_dim, double k0,
                                            double floor = 1e-14);

// Signed permutation: column a maps to sign[a] * e_{perm[a]}.
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int8_t> sign;

  static SignedPermutation identity(int k);
  SignedPermutation then(const SignedPermutation& next) const; // next * this
  int trace() const;
  bool operator==(const SignedPermutation& o) const { return perm == o.perm && sign == o.sign; }
};

enum class AmplitudeRule { uniform, signed_random };
enum class ExpanderBoundary { periodic, open };

struct ExpanderEdge {
  int u = 0;
  int v = 0;
  int color = 0; // 0-based label s
};

struct ExpanderMPS {
  int k = 0;
  int d = 0;
  std::vector<ExpanderEdge> edges;
  std::vector<SignedPermutation> generators; // A(s) up to the 1/sqrt(d) factor
  AmplitudeRule rule = AmplitudeRule::uniform;
  int graph_attempts = 0;

  CMatrix tensor(int s) const;
  // Degree and color checks; empty string when valid.
  std::string structure_error() const;
};

ExpanderMPS build_expander_mps(int k, int d, uint64_t seed, AmplitudeRule rule = AmplitudeRule::uniform,
                               int max_graphs = 200, int colorings_per_graph = 50);

struct ExpanderRdm {
  CMatrix rho;
  double deviation = 0.0; // trace norm of rho - 1/D^len
  double entropy = 0.0;
  bool regime_ok = true;  // D^len much smaller than k
  std::size_t distinct_products = 0;
};

ExpanderRdm expander_interval_rdm(const ExpanderMPS& e, int n_sites, const Interval& x,
                                  ExpanderBoundary boundary = ExpanderBoundary::periodic);

// Full amplitude vector, normalized; only for small chains.
CVector expander_state(const ExpanderMPS& e, int n_sites, ExpanderBoundary boundary = ExpanderBoundary::periodic,
                       Index budget = Index(1) << 22);

void write_edge_list(std::ostream& out, const ExpanderMPS& e);

// Operator A1 (x) A2 supported on [1, j-l] and [j+l+1, N]; an empty region carries a 1x1 matrix.
struct FarOperator {
  CMatrix left;
  CMatrix right;
};

FarOperator far_identity(int n_sites, int local_dim, int j, int l);

double fwdback_functional(const CVector& state, int n_sites, int local_dim, int j, int l, const FarOperator& a,
                          const RVector& o_weights);

struct ProbeResult {
  double value = 0.0;
  FarOperator a;
  RVector o_weights;
};

// Random start followed by alternating maximization over A1, A2 (polar factors) and signs O(alpha).
ProbeResult probe_functional(const CVector& state, int n_sites, int local_dim, int j, int l, std::mt19937_64& rng,
                             int sweeps = 20);

struct ConjectureRow {
  int l = 0;
  int trials = 0;
  double max_functional = 0.0;
  double xi_prime = 0.0;
  double epsilon = 0.0;
  double bound_at_xi_prime = 0.0; // 3 sqrt(2 eps) + eps with eps = c1 exp(-l / xi')
  double entropy = 0.0;
};

std::vector<ConjectureRow> conjecture_probe(const CVector& state, int n_sites, int local_dim,
                                            const std::vector<int>& l_list, int trials, uint64_t seed,
                                            const std::vector<double>& xi_primes, double c1 = 1.0);

double correlation_bound(double epsilon);

void write_probe_header(std::ostream& out);
void write_probe_row(std::ostream& out, const ConjectureRow& r);

} // namespace arealaw
