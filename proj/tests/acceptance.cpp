// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arealaw/agsp.hpp"
#include "arealaw/bounds.hpp"
#include "arealaw/entanglement.hpp"
#include "arealaw/experiment.hpp"
#include "arealaw/io.hpp"
#include "arealaw/lattice_model.hpp"
#include "arealaw/linalg.hpp"
#include "arealaw/mps.hpp"
#include "arealaw/quadrature.hpp"
#include "arealaw/spectral.hpp"

using namespace arealaw;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::vector<std::string> lines;
  void info(const std::string& s) { lines.push_back(s); }
};

using io::num;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Hamiltonian1D tfim(int n, double h) { return build_model("transverse_ising", n, {{"J", 1.0}, {"h", h}}); }

SpectralData ground_only(const Hamiltonian1D& h) {
  DiagonalizationOptions o;
  o.mode = DiagonalizationMode::lowest_m;
  return diagonalize(h, o);
}

double col(const CsvTable& t, const std::vector<std::string>& r, const std::string& name) {
  const int c = t.column(name);
  if (c < 0) throw std::runtime_error("missing column " + name);
  return std::stod(r[c]);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Env {
  fs::path workdir;
  fs::path configs;
  // epsilon(l) at N=12, h=2, j=6, filled by criterion 2
  std::map<int, double> epsilon;
};

RunOutcome run_config(const Env& env, const std::string& config, const std::string& dir) {
  fs::remove_all(env.workdir / dir);
  const auto cfg = load_config(env.configs / config, {"output_dir=" + (env.workdir / dir).string()});
  return run_experiment(cfg);
}

// ---------------------------------------------------------------------------

Verdict exact_inequalities(Env& env) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = run_config(env, "exact_suite.json", "exact_suite");
  const double secs = seconds_since(t0);
  const CsvTable t = read_csv(env.workdir / "exact_suite" / "bounds.csv");

  const std::vector<std::string> families{"subadditivity", "entropy_increment", "lindblad_uhlmann_measured",
                                          "cauchy_schwarz", "x_bound"};
  std::map<std::string, std::pair<int, double>> seen; // family -> (applicable rows, min slack)
  for (const auto& f : families) seen[f] = {0, INFINITY};
  for (const auto& r : t.rows) {
    const std::string q = r[t.column("quantity")];
    if (r[t.column("applicable")] != "1") continue;
    for (const auto& f : families)
      if (q.rfind(f, 0) == 0) {
        seen[f].first++;
        seen[f].second = std::min(seen[f].second, col(t, r, "slack"));
      }
  }
  bool ok = out.skipped.empty();
  for (const auto& [f, s] : seen) {
    // the x bounds only apply once y >= 1 - 2 eps; they need no rows to pass
    const bool conditional = f == "x_bound";
    v.info(f + ": " + std::to_string(s.first) + " applicable rows, min slack " + num(s.second) +
           (conditional && s.first == 0 ? " (precondition y >= 1 - 2 eps never met)" : ""));
    ok = ok && (conditional || s.first > 0) && s.second >= -1e-9;
  }
  for (const auto& s : out.skipped) v.info("skipped: " + s);
  v.info("run failures: " + std::to_string(out.failures.size()));
  v.info("runtime " + num(secs) + " s (limit 600 s)");
  v.pass = ok && secs <= 600.0;
  return v;
}

Verdict agsp_decay(Env& env) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  run_config(env, "agsp_decay.json", "agsp_decay");
  const double secs = seconds_since(t0);
  const CsvTable t = read_csv(env.workdir / "agsp_decay" / "agsp.csv");
  std::vector<double> ls, eps, logs;
  for (const auto& r : t.rows) {
    const int l = int(col(t, r, "l"));
    ls.push_back(l);
    eps.push_back(col(t, r, "epsilon"));
    logs.push_back(std::log(eps.back()));
    env.epsilon[l] = eps.back();
    v.info("l=" + std::to_string(l) + " epsilon " + num(eps.back()) + " q " + r[t.column("q")]);
  }
  if (ls.size() != 3) {
    v.info("expected 3 rows, got " + std::to_string(ls.size()));
    return v;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < eps.size(); ++i) monotone = monotone && eps[i] < eps[i - 1];
  const LineFit f = fit_line(ls, logs);
  v.info(std::string("monotone decreasing: ") + (monotone ? "yes" : "no"));
  v.info("log-linear fit slope " + num(f.slope) + ", R^2 " + num(f.r_squared) + " (need < 0 and >= 0.9)");
  v.info("runtime " + num(secs) + " s (limit 1800 s)");
  v.pass = monotone && f.slope < 0.0 && f.r_squared >= 0.9 && secs <= 1800.0;
  return v;
}

Verdict positivization() {
  Verdict v;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  auto gauss = [&](int r, int c) {
    CMatrix m(r, c);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(g(rng), g(rng));
    return m;
  };
  double worst = -INFINITY;
  int held = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + trial % 5;
    const int rank = 1 + trial % 3;
    // Q: projector of rank 2 rank containing P
    const CMatrix basis = gauss(n, 2 * rank);
    Eigen::HouseholderQR<CMatrix> qr(basis);
    const CMatrix u = qr.householderQ() * CMatrix::Identity(n, 2 * rank);
    const CMatrix p = u.leftCols(rank) * u.leftCols(rank).adjoint();
    const CMatrix q = u * u.adjoint();
    const double noise = 0.02 + 0.4 * (trial % 10) / 10.0;
    CMatrix b = p + noise * gauss(n, n) / std::sqrt(double(n));
    b /= std::max(1.0, linalg::operator_norm(b));
    const auto r = positivize(b, q, p);
    worst = std::max(worst, r.report.measured - r.report.bound);
    if (r.report.measured <= r.report.bound + 1e-10) ++held;
  }
  v.info("random contractions: " + std::to_string(held) + "/100 within bound, worst excess " + num(worst));
  bool ok = held == 100;
  for (double eps : {0.01, 0.1}) {
    CMatrix p = CMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    CMatrix b = CMatrix::Zero(2, 2);
    b(0, 0) = 1.0 - eps;
    b(0, 1) = std::sqrt(1.0 - (1.0 - eps) * (1.0 - eps));
    const auto r = positivize(b, p, p);
    const bool sqrt_regime = r.report.measured > 3.0 * eps;
    const bool within = r.report.measured <= r.report.bound + 1e-10;
    v.info("2x2 example eps=" + num(eps) + ": measured " + num(r.report.measured) + ", bound " +
           num(r.report.bound) + ", 3 eps " + num(3.0 * eps));
    ok = ok && sqrt_regime && within && std::abs(r.report.epsilon - eps) < 1e-10;
  }
  v.pass = ok;
  return v;
}

Verdict filter_oracle(Env& env) {
  Verdict v;
  // q values the AGSP uses: (l/3) gap / (2 v), l in {2, 4, 6}, v from the commutator fit
  std::map<double, double> velocity;
  for (double h : {1.5, 2.0}) {
    const std::string dir = "locality_h" + num(h);
    fs::remove_all(env.workdir / dir);
    auto cfg = load_config(env.configs / "agsp_decay.json",
                           {"output_dir=" + (env.workdir / dir).string(), "tasks=[\"locality\"]",
                            "sweep.coupling.values=[" + num(h) + "]", "agsp.locality_n_sites=8"});
    run_experiment(cfg);
    const CsvTable t = read_csv(env.workdir / dir / "locality_fit.csv");
    velocity[h] = col(t, t.rows.at(0), "v");
    v.info("h=" + num(h) + ": fitted v " + num(velocity[h]));
  }
  double worst_op = 0.0, worst_proj = 0.0;
  std::vector<std::string> extended;
  for (int n : {4, 6, 8})
    for (double h : {1.5, 2.0}) {
      const auto ham = tfim(n, h);
      const auto sd = diagonalize(ham);
      std::vector<int> left_bonds;
      for (int b = 1; b < n / 2; ++b) left_bonds.push_back(b);
      const CMatrix a = ham.sparse(left_bonds).toDense();
      for (int l : {2, 4, 6}) {
        const double q = filter_parameter(l, sd.gap, velocity[h]);
        const auto rule = gaussian_time_rule(q, sd.gap, 64);
        worst_op = std::max(worst_op, linalg::operator_norm(gaussian_filter_operator(sd, a, q) -
                                                            quadrature_filter_operator(ham, sd, a, q, rule)));
        worst_proj = std::max(worst_proj, linalg::operator_norm(gaussian_filter_projector(sd, q) -
                                                                quadrature_filter_projector(ham, sd, q, rule)));
      }
      if (n == 8)
        for (double q : {1.0, 2.0}) {
          const auto rule = gaussian_time_rule(q, sd.gap, 64);
          extended.push_back(
              "  N=8 h=" + num(h) + " q=" + num(q) + ": operator " +
              num(linalg::operator_norm(gaussian_filter_operator(sd, a, q) -
                                        quadrature_filter_operator(ham, sd, a, q, rule))) +
              ", projector " +
              num(linalg::operator_norm(gaussian_filter_projector(sd, q) -
                                        quadrature_filter_projector(ham, sd, q, rule))));
        }
    }
  v.info("N in {4,6,8}, h in {1.5,2}, q from l in {2,4,6}: max operator-filter error " + num(worst_op) +
         ", max projector-filter error " + num(worst_proj) + " (tolerance 1e-6)");
  v.info("beyond the AGSP range (diagnostic, not scored):");
  for (const auto& s : extended) v.info(s);
  v.pass = worst_op <= 1e-6 && worst_proj <= 1e-6;
  return v;
}

Verdict schmidt_tail_shape() {
  Verdict v;
  const CVector psi = ground_only(tfim(12, 2.0)).ground_state();
  const CutData cut = schmidt_cut(psi, 12, 2, 6);
  const double k0 = k0_from_entropy(cut.entropy());
  const double mass = k0_mass(cut);
  const auto prof = schmidt_tail_profile(cut, 2, k0);
  std::vector<double> m, logt;
  for (const auto& p : prof)
    if (p.tail > 0.0) {
      m.push_back(p.m);
      logt.push_back(std::log(p.tail));
    }
  v.info("S " + num(cut.entropy()) + ", k0 " + num(k0) + ", k0 mass " + num(mass) + " (need >= 0.5)");
  v.info(std::to_string(m.size()) + " tail points, m = 0.." + std::to_string(m.empty() ? -1 : int(m.back())));
  if (m.size() < 3) {
    v.info("too few points for a fit");
    return v;
  }
  const LineFit f = fit_line(m, logt);
  v.info("log-linear fit slope " + num(f.slope) + ", R^2 " + num(f.r_squared) + " (need < 0 and >= 0.9)");
  v.pass = mass >= 0.5 && f.slope < 0.0 && f.r_squared >= 0.9;
  return v;
}

Verdict area_law_contrast() {
  Verdict v;
  auto mid = [](int n, double h) {
    const CVector psi = ground_only(tfim(n, h)).ground_state();
    return schmidt_cut(psi, n, 2, n / 2).entropy();
  };
  const double gapped = mid(12, 2.0) - mid(8, 2.0);
  const double critical = mid(12, 1.0) - mid(8, 1.0);
  v.info("h=2: S(12) - S(8) = " + num(gapped) + " (need < 0.05)");
  v.info("h=1: S(12) - S(8) = " + num(critical) + " (need > 0.05)");
  v.pass = std::abs(gapped) < 0.05 && critical > 0.05;
  return v;
}

Verdict expander_mixing() {
  Verdict v;
  std::vector<double> dev;
  for (int k : {16, 64, 256}) {
    const auto e = build_expander_mps(k, 3, 7);
    const auto r = expander_interval_rdm(e, 10, {5, 5});
    dev.push_back(r.deviation);
    v.info("k=" + std::to_string(k) + ": trace distance to I/3 " + num(r.deviation) + ", structure " +
           (e.structure_error().empty() ? "ok" : e.structure_error()));
  }
  v.pass = dev[2] <= 0.05 && dev[1] < dev[0] && dev[2] < dev[1];
  return v;
}

Verdict correlation_probe(const Env& env) {
  Verdict v;
  if (env.epsilon.empty()) {
    v.info("no epsilon(l) from the AGSP decay run");
    return v;
  }
  const CVector psi = ground_only(tfim(12, 2.0)).ground_state();
  std::mt19937_64 rng(99);
  const int per_l = 200;
  int violations = 0;
  for (const auto& [l, eps] : env.epsilon) {
    const double bound = correlation_bound(eps);
    const auto far = far_identity(12, 2, 6, l);
    const bool empty = far.left.size() == 1 && far.right.size() == 1;
    double worst = 0.0;
    for (int t = 0; t < per_l; ++t) {
      const auto r = probe_functional(psi, 12, 2, 6, l, rng);
      worst = std::max(worst, std::abs(r.value));
      if (std::abs(r.value) > bound + 1e-12) ++violations;
    }
    v.info("l=" + std::to_string(l) + ": " + std::to_string(per_l) + " probes, max |functional| " + num(worst) +
           ", bound " + num(bound) + (bound >= 2.0 ? " (exceeds the trivial maximum 2)" : "") +
           (empty ? ", far region empty" : ""));
  }
  v.info("violations: " + std::to_string(violations));
  v.pass = violations == 0;
  return v;
}

Verdict closed_forms() {
  Verdict v;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xi(1.5, 4.0), c1(0.6, 3.0), c2(0.0, 2.0);
  std::uniform_int_distribution<int> dd(2, 3);
  double worst_mismatch = 0.0;
  int l0_match = 0;
  std::vector<double> ratios;
  for (int draw = 0; draw < 20; ++draw) {
    BoundParameters p;
    p.xi_prime = xi(rng);
    p.d = dd(rng);
    p.c1 = c1(rng);
    p.c2 = c2(rng);
    const double x0 = 2.0 * p.xi_prime * std::log(2.0 * p.c1);
    const auto it = claim_iteration(x0 * std::log(double(p.d)), x0, p);
    worst_mismatch = std::max(worst_mismatch, it.max_step_mismatch);
    if (it.l0_recursion > 0.0) {
      ratios.push_back(it.l0_formula / it.l0_recursion);
      if (std::abs(it.l0_formula - it.l0_recursion) <= 1e-9 * it.l0_recursion) ++l0_match;
    }
  }
  v.info("(a) max |recursion - closed form| over all steps " + num(worst_mismatch) + " (tolerance 1e-12)");
  std::sort(ratios.begin(), ratios.end());
  v.info("(b) l0 formula equals the recursion's contradiction point in " + std::to_string(l0_match) +
         "/20 draws; ratio formula/explicit in [" + (ratios.empty() ? "-" : num(ratios.front())) + ", " +
         (ratios.empty() ? "-" : num(ratios.back())) + "] over " + std::to_string(ratios.size()) +
         " draws that reached it");
  v.pass = worst_mismatch <= 1e-12 && l0_match == 20;
  return v;
}

Verdict determinism(const Env& env) {
  Verdict v;
  run_config(env, "smoke.json", "repeat_a");
  run_config(env, "smoke.json", "repeat_b");
  int same = 0, total = 0;
  for (const auto& e : fs::directory_iterator(env.workdir / "repeat_a")) {
    if (e.path().extension() != ".csv") continue;
    ++total;
    const fs::path other = env.workdir / "repeat_b" / e.path().filename();
    if (fs::exists(other) && slurp(e.path()) == slurp(other))
      ++same;
    else
      v.info("differs: " + e.path().filename().string());
  }
  v.info(std::to_string(same) + "/" + std::to_string(total) + " CSV files byte-identical across two runs");
  v.pass = total > 0 && same == total;
  return v;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Env env;
  std::string workdir = "acceptance_runs";
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Directory for run outputs");
  app.add_option("--only", only, "Criteria to run (default all)");
  CLI11_PARSE(app, argc, argv);
  env.workdir = workdir;
  env.configs = AREALAW_CONFIG_DIR;
  fs::create_directories(env.workdir);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"exact inequality suite", [&] { return exact_inequalities(env); }},
      {"AGSP decay", [&] { return agsp_decay(env); }},
      {"positivization", [] { return positivization(); }},
      {"spectral vs quadrature filters", [&] { return filter_oracle(env); }},
      {"Schmidt tail shape", [] { return schmidt_tail_shape(); }},
      {"area law vs critical contrast", [] { return area_law_contrast(); }},
      {"expander maximal mixing", [] { return expander_mixing(); }},
      {"connected correlator bound", [&] { return correlation_probe(env); }},
      {"bounds closed forms", [] { return closed_forms(); }},
      {"determinism", [&] { return determinism(env); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.info(std::string("error: ") + e.what());
    }
    std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << ": " << criteria[i].first << " ("
              << num(seconds_since(t0)) << " s)\n";
    for (const auto& s : v.lines) std::cout << "    " << s << "\n";
    std::cout.flush();
    if (!v.pass) ++failed;
  }
  std::cout << failed << " criteria failed\n";
  return failed == 0 ? 0 : 1;
}
