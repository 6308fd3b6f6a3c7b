#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "arealaw/errors.hpp"
#include "arealaw/mps.hpp"

namespace arealaw {

SignedPermutation SignedPermutation::identity(int k) {
  SignedPermutation p;
  p.perm.resize(k);
  std::iota(p.perm.begin(), p.perm.end(), 0);
  p.sign.assign(k, 1);
  return p;
}

SignedPermutation SignedPermutation::then(const SignedPermutation& next) const {
  SignedPermutation out;
  const std::size_t k = perm.size();
  out.perm.resize(k);
  out.sign.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    out.perm[a] = next.perm[perm[a]];
    out.sign[a] = static_cast<int8_t>(sign[a] * next.sign[perm[a]]);
  }
  return out;
}

int SignedPermutation::trace() const {
  int t = 0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    if (perm[a] == static_cast<int>(a)) t += sign[a];
  return t;
}

namespace {

struct PermHash {
  std::size_t operator()(const SignedPermutation& p) const {
    uint64_t h = 1469598103934665603ULL;
    for (std::size_t a = 0; a < p.perm.size(); ++a) {
      h ^= static_cast<uint64_t>(p.perm[a]) * 2 + (p.sign[a] < 0 ? 1 : 0);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

using PermMultiset = std::unordered_map<SignedPermutation, double, PermHash>;

// Configuration model: random stub pairing, self-loops always rejected,
// multi-edges rejected once k >= 8.
bool random_regular_graph(int k, int d, std::mt19937_64& rng, std::vector<ExpanderEdge>& edges) {
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(k) * d);
  for (int v = 0; v < k; ++v)
    for (int c = 0; c < d; ++c) stubs.push_back(v);
  std::shuffle(stubs.begin(), stubs.end(), rng);
  edges.clear();
  for (std::size_t i = 0; i < stubs.size(); i += 2) {
    int u = stubs[i], v = stubs[i + 1];
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    edges.push_back({u, v, -1});
  }
  if (k >= 8) {
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end(),
              [](const ExpanderEdge& a, const ExpanderEdge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i].u == sorted[i - 1].u && sorted[i].v == sorted[i - 1].v) return false;
  }
  return true;
}

// Greedy proper d-edge-coloring with Kempe-chain swaps.
bool color_edges(int k, int d, std::vector<ExpanderEdge>& edges, std::mt19937_64& rng) {
  std::vector<std::vector<int>> at(k, std::vector<int>(d, -1));
  for (auto& e : edges) e.color = -1;
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  auto other = [&](std::size_t ei, int x) { return edges[ei].u == x ? edges[ei].v : edges[ei].u; };

  for (std::size_t ei : order) {
    const int u = edges[ei].u, v = edges[ei].v;
    int common = -1;
    for (int c = 0; c < d && common < 0; ++c)
      if (at[u][c] < 0 && at[v][c] < 0) common = c;
    if (common < 0) {
      bool done = false;
      for (int a = 0; a < d && !done; ++a) {
        if (at[u][a] >= 0) continue;
        for (int b = 0; b < d && !done; ++b) {
          if (at[v][b] >= 0) continue;
          // alternating a/b path from v, starting on its a-edge
          std::vector<std::size_t> path;
          int x = v, c = a;
          bool hits_u = false;
          while (at[x][c] >= 0) {
            const std::size_t pe = static_cast<std::size_t>(at[x][c]);
            path.push_back(pe);
            x = other(pe, x);
            if (x == u) {
              hits_u = true;
              break;
            }
            c = c == a ? b : a;
          }
          if (hits_u) continue;
          for (std::size_t pe : path) {
            at[edges[pe].u][edges[pe].color] = -1;
            at[edges[pe].v][edges[pe].color] = -1;
          }
          for (std::size_t pe : path) {
            edges[pe].color = edges[pe].color == a ? b : a;
            at[edges[pe].u][edges[pe].color] = static_cast<int>(pe);
            at[edges[pe].v][edges[pe].color] = static_cast<int>(pe);
          }
          common = a;
          done = true;
        }
      }
      if (!done) return false;
    }
    edges[ei].color = common;
    at[u][common] = static_cast<int>(ei);
    at[v][common] = static_cast<int>(ei);
  }
  return true;
}

SignedPermutation word_product(const ExpanderMPS& e, const std::vector<int>& word) {
  SignedPermutation p = SignedPermutation::identity(e.k);
  // A(w1) ... A(wn): rightmost acts first
  for (auto it = word.rbegin(); it != word.rend(); ++it) p = p.then(e.generators[*it]);
  return p;
}

std::vector<std::vector<int>> all_words(int d, int len) {
  std::vector<std::vector<int>> out(1);
  for (int i = 0; i < len; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& w : out)
      for (int s = 0; s < d; ++s) {
        next.push_back(w);
        next.back().push_back(s);
      }
    out = std::move(next);
  }
  return out;
}

// Distribution of the walk e_0 -> A(s_m)...A(s_1) e_0 over nodes, summed over words (normalized).
RVector walk_distribution(const ExpanderMPS& e, int steps) {
  RVector p = RVector::Zero(e.k);
  p(0) = 1.0;
  for (int i = 0; i < steps; ++i) {
    RVector q = RVector::Zero(e.k);
    for (const auto& g : e.generators)
      for (int a = 0; a < e.k; ++a) q(g.perm[a]) += p(a);
    p = q / q.sum();
  }
  return p;
}

} // namespace

CMatrix ExpanderMPS::tensor(int s) const {
  if (s < 0 || s >= d) throw ConfigError("expander tensor label out of range");
  CMatrix a = CMatrix::Zero(k, k);
  const double amp = 1.0 / std::sqrt(double(d));
  for (int c = 0; c < k; ++c) a(generators[s].perm[c], c) = amp * generators[s].sign[c];
  return a;
}

std::string ExpanderMPS::structure_error() const {
  std::vector<std::vector<int>> seen(k, std::vector<int>(d, 0));
  for (const auto& e : edges) {
    if (e.color < 0 || e.color >= d) return "edge without a valid label";
    if (e.u == e.v) return "self-loop";
    ++seen[e.u][e.color];
    ++seen[e.v][e.color];
  }
  for (int v = 0; v < k; ++v)
    for (int c = 0; c < d; ++c)
      if (seen[v][c] != 1) return "node " + std::to_string(v) + " sees label " + std::to_string(c + 1) + " " +
                                  std::to_string(seen[v][c]) + " times";
  for (int c = 0; c < d; ++c)
    for (const auto& e : edges)
      if (e.color == c && (generators[c].perm[e.u] != e.v || generators[c].perm[e.v] != e.u))
        return "tensor pattern does not match edge labels";
  return {};
}

ExpanderMPS build_expander_mps(int k, int d, uint64_t seed, AmplitudeRule rule, int max_graphs,
                               int colorings_per_graph) {
  if (d < 3) throw ConfigError("expander MPS needs d >= 3");
  if (k < 2) throw ConfigError("expander MPS needs k >= 2");
  if ((static_cast<long>(k) * d) % 2 != 0) throw ConfigError("k * d must be even");
  if (k % 2 != 0) throw ConfigError("a proper d-edge-coloring of a d-regular graph needs even k");

  std::mt19937_64 rng(seed);
  ExpanderMPS e;
  e.k = k;
  e.d = d;
  e.rule = rule;
  for (int attempt = 1; attempt <= max_graphs; ++attempt) {
    if (!random_regular_graph(k, d, rng, e.edges)) continue;
    bool ok = false;
    for (int c = 0; c < colorings_per_graph && !ok; ++c) ok = color_edges(k, d, e.edges, rng);
    if (!ok) continue;
    e.graph_attempts = attempt;
    e.generators.assign(d, SignedPermutation::identity(k));
    std::bernoulli_distribution coin(0.5);
    for (const auto& ed : e.edges) {
      auto& g = e.generators[ed.color];
      const int8_t sg = rule == AmplitudeRule::signed_random && coin(rng) ? -1 : 1;
      g.perm[ed.u] = ed.v;
      g.perm[ed.v] = ed.u;
      g.sign[ed.u] = sg;
      g.sign[ed.v] = sg;
    }
    return e;
  }
  throw NumericalError("expander coloring retries exhausted");
}

ExpanderRdm expander_interval_rdm(const ExpanderMPS& e, int n_sites, const Interval& x, ExpanderBoundary boundary) {
  validate_interval(x, n_sites);
  const int len = x.length();
  if (len >= n_sites) throw ConfigError("interval must leave part of the chain outside");
  const Index dim = ipow(e.d, len);
  ExpanderRdm out;
  out.regime_ok = 4 * dim <= e.k;

  const auto words = all_words(e.d, len);
  std::vector<SignedPermutation> inner;
  inner.reserve(words.size());
  for (const auto& w : words) inner.push_back(word_product(e, w));

  RMatrix rho = RMatrix::Zero(dim, dim);
  if (boundary == ExpanderBoundary::periodic) {
    // multiset of products over the complementary sites
    PermMultiset rest;
    rest.emplace(SignedPermutation::identity(e.k), 1.0);
    for (int i = 0; i < n_sites - len; ++i) {
      PermMultiset next;
      for (const auto& [p, c] : rest)
        for (const auto& g : e.generators) next[p.then(g)] += c / e.d;
      rest = std::move(next);
      if (rest.size() * static_cast<std::size_t>(e.k) > (std::size_t(1) << 28))
        throw BudgetError("expander_interval_rdm: too many distinct boundary products");
    }
    out.distinct_products = rest.size();
    std::vector<double> tr(dim);
    for (const auto& [r, c] : rest) {
      for (Index t = 0; t < dim; ++t) tr[t] = r.then(inner[t]).trace();
      for (Index t = 0; t < dim; ++t)
        for (Index u = 0; u < dim; ++u) rho(t, u) += c * tr[t] * tr[u];
    }
  } else {
    const RVector left = walk_distribution(e, x.first - 1);  // node distribution of e_0^T A(s_1)...A(s_{a-1})
    const RVector right = walk_distribution(e, n_sites - x.last);
    for (Index t = 0; t < dim; ++t)
      for (Index u = 0; u < dim; ++u) {
        double acc = 0.0;
        for (int g = 0; g < e.k; ++g)
          if (inner[t].perm[g] == inner[u].perm[g])
            acc += right(g) * left(inner[t].perm[g]) * inner[t].sign[g] * inner[u].sign[g];
        rho(t, u) = acc;
      }
  }
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw NumericalError("expander_interval_rdm: vanishing norm");
  out.rho = (rho / tr).cast<Complex>();
  const RVector ev = linalg::eigvalsh(out.rho - CMatrix::Identity(dim, dim) / double(dim));
  out.deviation = ev.cwiseAbs().sum();
  out.entropy = von_neumann_entropy(out.rho);
  return out;
}

CVector expander_state(const ExpanderMPS& e, int n_sites, ExpanderBoundary boundary, Index budget) {
  if (n_sites < 1) throw ConfigError("expander_state: n_sites must be >= 1");
  const Index dim = ipow(e.d, n_sites);
  if (dim > budget) throw BudgetError("expander_state: D^N exceeds budget");
  CVector psi(dim);
  Index idx = 0;
  // prefix A(s_1)...A(s_i), site 1 most significant
  std::function<void(const SignedPermutation&, int)> visit = [&](const SignedPermutation& pre, int depth) {
    if (depth == n_sites) {
      if (boundary == ExpanderBoundary::periodic)
        psi(idx++) = double(pre.trace());
      else
        psi(idx++) = pre.perm[0] == 0 ? double(pre.sign[0]) : 0.0;
      return;
    }
    for (int s = 0; s < e.d; ++s) visit(e.generators[s].then(pre), depth + 1);
  };
  visit(SignedPermutation::identity(e.k), 0);
  const double n = psi.norm();
  if (n == 0.0) throw NumericalError("expander_state: all amplitudes vanish");
  return psi / n;
}

void write_edge_list(std::ostream& out, const ExpanderMPS& e) {
  out << "# k=" << e.k << " d=" << e.d << "\n";
  for (const auto& ed : e.edges) out << ed.u << ' ' << ed.v << ' ' << ed.color + 1 << "\n";
}

} // namespace arealaw
