#include "arealaw/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <omp.h>

#include "arealaw/bounds.hpp"
#include "arealaw/entanglement.hpp"
#include "arealaw/errors.hpp"
#include "arealaw/io.hpp"
#include "arealaw/locality.hpp"
#include "arealaw/spectral.hpp"

namespace arealaw {

using nlohmann::json;

namespace {

const std::set<std::string> kTasks{"area_law", "mps", "locality", "agsp", "bounds", "expander"};

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T value_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

template <class T>
std::optional<T> optional_value(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return value_or<T>(j, key, T{});
}

json section(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return json::object();
  return j.at(key);
}

std::string hex64(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\n' && c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class F>
std::vector<std::string> cells_of(F&& writer) {
  std::ostringstream os;
  writer(os);
  return split_cells(os.str());
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

double parse_double(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan" || s.empty()) return NAN;
  return std::stod(s);
}

} // namespace

bool has_task(const ExperimentConfig& cfg, const std::string& task) {
  return std::find(cfg.tasks.begin(), cfg.tasks.end(), task) != cfg.tasks.end();
}

ExperimentConfig parse_config(const json& j) {
  only_keys(j, {"name", "seed", "output_dir", "tasks", "budget", "workers", "model", "sweep", "agsp", "bounds",
                "expander"},
            "config");
  ExperimentConfig c;
  c.name = value_or<std::string>(j, "name", c.name);
  c.seed = value_or<uint64_t>(j, "seed", c.seed);
  c.output_dir = value_or<std::string>(j, "output_dir", c.output_dir.string());
  c.workers = value_or<int>(j, "workers", 1);
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  c.tasks = value_or<std::vector<std::string>>(j, "tasks", {"area_law", "mps", "agsp", "bounds"});
  for (const auto& t : c.tasks)
    if (!kTasks.count(t)) throw ConfigError("unknown task '" + t + "'");

  const json budget = section(j, "budget");
  only_keys(budget, {"max_dimension"}, "budget");
  c.max_dimension = value_or<Index>(budget, "max_dimension", c.max_dimension);
  if (c.max_dimension < 2) throw ConfigError("budget.max_dimension must be >= 2");

  const json model = section(j, "model");
  only_keys(model, {"family", "params", "file"}, "model");
  c.family = value_or<std::string>(model, "family", c.family);
  c.params = value_or<ModelParams>(model, "params", {});
  c.model_file = value_or<std::string>(model, "file", "");

  const json sweep = section(j, "sweep");
  only_keys(sweep, {"n_sites", "coupling", "j", "l", "k_prime", "alpha"}, "sweep");
  c.n_sites = value_or<std::vector<int>>(sweep, "n_sites", {});
  const json coupling = section(sweep, "coupling");
  only_keys(coupling, {"name", "values"}, "sweep.coupling");
  c.coupling_name = value_or<std::string>(coupling, "name", "");
  c.couplings = value_or<std::vector<double>>(coupling, "values", {});
  if (!c.couplings.empty() && c.coupling_name.empty()) throw ConfigError("sweep.coupling needs a name");
  c.j_list = value_or<std::vector<int>>(sweep, "j", {});
  c.l_list = value_or<std::vector<int>>(sweep, "l", {});
  c.k_prime = value_or<std::vector<int>>(sweep, "k_prime", {});
  c.alphas = value_or<std::vector<double>>(sweep, "alpha", {});

  const json agsp = section(j, "agsp");
  only_keys(agsp, {"velocity", "method", "locality_n_sites", "locality_times"}, "agsp");
  c.velocity = optional_value<double>(agsp, "velocity");
  const std::string method = value_or<std::string>(agsp, "method", "spectral");
  if (method == "spectral")
    c.method = PropagatorMethod::spectral;
  else if (method == "ode")
    c.method = PropagatorMethod::ode;
  else
    throw ConfigError("agsp.method must be spectral or ode");
  c.locality_n_sites = value_or<int>(agsp, "locality_n_sites", c.locality_n_sites);
  c.locality_times = value_or<std::vector<double>>(agsp, "locality_times", {});
  if (c.locality_times.empty())
    for (int k = 0; k <= 16; ++k) c.locality_times.push_back(0.25 * k);

  const json bounds = section(j, "bounds");
  only_keys(bounds, {"c0", "c1", "c2", "xi_prime"}, "bounds");
  c.c0 = value_or<double>(bounds, "c0", 1.0);
  c.c2 = value_or<double>(bounds, "c2", 1.0);
  c.c1 = optional_value<double>(bounds, "c1");
  c.xi_prime = optional_value<double>(bounds, "xi_prime");
  if (!(c.c0 > 0.0)) throw ConfigError("bounds.c0 must be positive");
  if (c.c1 && !(*c.c1 > 0.0)) throw ConfigError("bounds.c1 must be positive");
  if (c.xi_prime && !(*c.xi_prime > 0.0)) throw ConfigError("bounds.xi_prime must be positive");

  const json ex = section(j, "expander");
  only_keys(ex, {"graphs", "n_sites", "interval_lengths", "amplitude", "probe"}, "expander");
  if (ex.contains("graphs"))
    for (const json& g : ex.at("graphs")) {
      only_keys(g, {"k", "d", "seed"}, "expander.graphs[]");
      ExpanderSpec s;
      s.k = value_or<int>(g, "k", 0);
      s.d = value_or<int>(g, "d", 3);
      s.seed = value_or<uint64_t>(g, "seed", c.seed);
      c.expanders.push_back(s);
    }
  c.expander_n_sites = value_or<int>(ex, "n_sites", c.expander_n_sites);
  c.interval_lengths = value_or<std::vector<int>>(ex, "interval_lengths", c.interval_lengths);
  const std::string amp = value_or<std::string>(ex, "amplitude", "uniform");
  if (amp == "uniform")
    c.amplitude = AmplitudeRule::uniform;
  else if (amp == "signed")
    c.amplitude = AmplitudeRule::signed_random;
  else
    throw ConfigError("expander.amplitude must be uniform or signed");
  const json probe = section(ex, "probe");
  only_keys(probe, {"trials", "n_sites", "l", "xi_prime"}, "expander.probe");
  c.probe_trials = value_or<int>(probe, "trials", 0);
  c.probe_n_sites = value_or<int>(probe, "n_sites", c.probe_n_sites);
  c.probe_l = value_or<std::vector<int>>(probe, "l", c.probe_l);
  c.probe_xi_prime = value_or<std::vector<double>>(probe, "xi_prime", c.probe_xi_prime);

  // preconditions, before any compute
  if (c.model_file.empty()) {
    parse_family(c.family);
    for (int n : c.n_sites) {
      if (n < 2) throw ConfigError("n_sites entries must be >= 2");
      ModelParams p = c.params;
      if (c.couplings.empty()) {
        build_model(c.family, n, p);
      } else {
        for (double g : c.couplings) {
          p[c.coupling_name] = g;
          build_model(c.family, n, p);
        }
      }
    }
  } else if (!c.n_sites.empty()) {
    throw ConfigError("model.file fixes the chain; leave sweep.n_sites empty");
  }
  for (int n : c.n_sites) {
    for (int jj : c.j_list)
      if (jj < 1 || jj >= n) throw ConfigError("j = " + std::to_string(jj) + " outside [1, N-1] for N = " + std::to_string(n));
    for (int l : c.l_list)
      if (l < 1 || l >= n) throw ConfigError("l = " + std::to_string(l) + " outside [1, N-1] for N = " + std::to_string(n));
  }
  for (int k : c.k_prime)
    if (k < 1) throw ConfigError("k_prime entries must be >= 1");
  for (double a : c.alphas)
    if (!(a > 0.0)) throw ConfigError("alpha entries must be positive");
  if (c.velocity && !(*c.velocity > 0.0)) throw ConfigError("agsp.velocity must be positive");
  if (c.locality_n_sites < 3) throw ConfigError("agsp.locality_n_sites must be >= 3");
  for (const auto& s : c.expanders)
    if (s.k < 1 || s.d < 1) throw ConfigError("expander k and d must be positive");
  if (c.expander_n_sites < 2) throw ConfigError("expander.n_sites must be >= 2");
  for (int len : c.interval_lengths)
    if (len < 1 || len >= c.expander_n_sites) throw ConfigError("expander interval length outside [1, n_sites - 1]");
  if (c.probe_trials < 0) throw ConfigError("probe trials must be >= 0");
  if (c.probe_n_sites < 2) throw ConfigError("probe n_sites must be >= 2");
  for (int l : c.probe_l)
    if (l < 1) throw ConfigError("probe l entries must be >= 1");
  for (double x : c.probe_xi_prime)
    if (!(x > 0.0)) throw ConfigError("probe xi_prime entries must be positive");

  json snap;
  snap["name"] = c.name;
  snap["seed"] = c.seed;
  snap["tasks"] = c.tasks;
  snap["workers"] = c.workers;
  snap["budget"] = {{"max_dimension", c.max_dimension}};
  snap["model"] = {{"family", c.family}, {"params", c.params}, {"file", c.model_file.string()}};
  snap["sweep"] = {{"n_sites", c.n_sites},
                   {"coupling", {{"name", c.coupling_name}, {"values", c.couplings}}},
                   {"j", c.j_list},
                   {"l", c.l_list},
                   {"k_prime", c.k_prime},
                   {"alpha", c.alphas}};
  snap["agsp"] = {{"velocity", c.velocity ? json(*c.velocity) : json()},
                  {"method", method},
                  {"locality_n_sites", c.locality_n_sites},
                  {"locality_times", c.locality_times}};
  snap["bounds"] = {{"c0", c.c0},
                    {"c1", c.c1 ? json(*c.c1) : json()},
                    {"c2", c.c2},
                    {"xi_prime", c.xi_prime ? json(*c.xi_prime) : json()}};
  json graphs = json::array();
  for (const auto& s : c.expanders) graphs.push_back({{"k", s.k}, {"d", s.d}, {"seed", s.seed}});
  snap["expander"] = {{"graphs", graphs},
                      {"n_sites", c.expander_n_sites},
                      {"interval_lengths", c.interval_lengths},
                      {"amplitude", amp},
                      {"probe",
                       {{"trials", c.probe_trials},
                        {"n_sites", c.probe_n_sites},
                        {"l", c.probe_l},
                        {"xi_prime", c.probe_xi_prime}}}};
  c.hash = hex64(fnv1a(snap.dump()));
  snap["output_dir"] = c.output_dir.string();
  c.snapshot = snap;
  return c;
}

namespace {

json set_path(json j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("empty component in override key " + key);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
  return j;
}

} // namespace

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  for (const auto& o : overrides) j = set_path(std::move(j), o);
  ExperimentConfig c = parse_config(j);
  if (!c.model_file.empty() && c.model_file.is_relative()) {
    c.model_file = path.parent_path() / c.model_file;
    c.snapshot["model"]["file"] = c.model_file.string();
  }
  return c;
}

// ---------------------------------------------------------------------------

RunContext::RunContext(const ExperimentConfig& cfg, std::ostream* log) : cfg_(cfg), log_(log) {}

std::vector<std::string> RunContext::prefix(const std::string& module) const {
  return {cfg_.hash, module + "/" + kVersion};
}

void RunContext::add(const std::string& source, const std::string& context, const ChainReport& r) {
  for (const auto& c : r.checks) {
    margins_.push_back({source, context, c});
    if (c.applicable && c.exact && !(c.slack >= -1e-9))
      fail(source + " " + context + " " + c.name + " slack " + io::num(c.slack));
  }
}

void RunContext::fail(const std::string& what) {
  failures_.push_back(what);
  if (log_) *log_ << "FAIL " << what << "\n";
}

void RunContext::skip(const std::string& what) {
  skipped_.push_back(what);
  if (log_) *log_ << "skip " << what << "\n";
}

void RunContext::note(const std::string& what) {
  if (log_) *log_ << what << "\n";
}

namespace {

// Lazily opened CSV files with the provenance columns in front.
class CsvSink {
public:
  CsvSink(const RunContext& ctx) : ctx_(ctx) {}

  void row(const std::string& file, const std::string& module, const std::vector<std::string>& header,
           const std::vector<std::string>& cells) {
    auto it = files_.find(file);
    if (it == files_.end()) {
      auto f = std::make_unique<std::ofstream>(ctx_.path(file), std::ios::binary);
      if (!*f) throw Error("cannot write " + ctx_.path(file).string());
      std::vector<std::string> h{"config_hash", "module_version"};
      h.insert(h.end(), header.begin(), header.end());
      io::write_row(*f, h);
      it = files_.emplace(file, std::move(f)).first;
    }
    std::vector<std::string> all = ctx_.prefix(module);
    all.insert(all.end(), cells.begin(), cells.end());
    io::write_row(*it->second, all);
  }

private:
  const RunContext& ctx_;
  std::map<std::string, std::unique_ptr<std::ofstream>> files_;
};

struct Instance {
  int n_sites = 0;
  std::string coupling = "";
  std::optional<double> coupling_value;
  Hamiltonian1D h;
  SpectralData sd;
  std::string label() const {
    return "N=" + std::to_string(n_sites) + (coupling_value ? ";" + coupling + "=" + io::num(*coupling_value) : "");
  }
};

struct Pipeline {
  RunContext& ctx;
  CsvSink sink;
  std::map<std::string, LocalityConstants> fits; // by coupling label

  explicit Pipeline(RunContext& c) : ctx(c), sink(c) {}

  const ExperimentConfig& cfg() const { return ctx.config(); }

  std::vector<std::string> base(const Instance& in) const {
    return {std::to_string(in.n_sites), in.coupling_value ? io::num(*in.coupling_value) : ""};
  }

  Hamiltonian1D model(int n, std::optional<double> g) const {
    ModelParams p = cfg().params;
    if (g) p[cfg().coupling_name] = *g;
    return build_model(cfg().family, n, p);
  }

  template <class F>
  void for_each_instance(F&& fn) {
    std::vector<std::optional<double>> gs;
    if (cfg().couplings.empty())
      gs.push_back(std::nullopt);
    else
      for (double g : cfg().couplings) gs.push_back(g);

    if (!cfg().model_file.empty()) {
      Instance in;
      in.h = load_model_file(cfg().model_file);
      in.n_sites = in.h.n_sites;
      run_instance(in, fn);
      return;
    }
    for (int n : cfg().n_sites)
      for (const auto& g : gs) {
        Instance in;
        in.n_sites = n;
        in.coupling = cfg().coupling_name;
        in.coupling_value = g;
        in.h = model(n, g);
        run_instance(in, fn);
      }
  }

  template <class F>
  void run_instance(Instance& in, F&& fn) {
    if (in.h.dimension() > cfg().max_dimension) {
      ctx.skip(in.label() + ": dimension " + std::to_string(in.h.dimension()) + " exceeds budget");
      return;
    }
    try {
      in.sd = diagonalize(in.h);
    } catch (const DegenerateGroundState& e) {
      ctx.skip(in.label() + ": gap check fails (" + std::string(e.what()) + ")");
      return;
    }
    sink.row("spectra.csv", "spectral_engine", {"n_sites", "coupling", "ground_energy", "gap", "j_bound", "dimension"},
             {std::to_string(in.n_sites), in.coupling_value ? io::num(*in.coupling_value) : "",
              io::num(in.sd.ground_energy), io::num(in.sd.gap), io::num(in.h.j_bound),
              std::to_string(in.h.dimension())});
    fn(in);
  }

  // ---- area law
  void area_law(const Instance& in) {
    const auto rows = entropy_profile(in.sd.ground_state(), in.n_sites, in.h.local_dim, cfg().alphas);
    std::vector<std::string> header{"n_sites", "coupling", "local_dim"};
    auto h2 = cells_of([&](std::ostream& o) { write_entropy_profile_header(o, cfg().alphas); });
    header.insert(header.end(), h2.begin(), h2.end());
    for (const auto& r : rows) {
      auto cells = base(in);
      cells.push_back(std::to_string(in.h.local_dim));
      auto c2 = cells_of([&](std::ostream& o) { write_entropy_profile_row(o, r); });
      cells.insert(cells.end(), c2.begin(), c2.end());
      sink.row("entropy_profile.csv", "entanglement_lab", header, cells);
    }
  }

  // ---- MPS
  void mps(const Instance& in) {
    const CVector psi = in.sd.ground_state();
    const int j = in.n_sites / 2;
    const CutData cut = schmidt_cut(psi, in.n_sites, in.h.local_dim, j);
    const double s = cut.entropy();
    const double k0 = k0_from_entropy(std::max(0.0, s));
    const double mass = k0_mass(cut);
    if (mass < 0.5) ctx.fail(in.label() + ": k0 mass " + io::num(mass) + " < 1/2");
    for (const auto& p : schmidt_tail_profile(cut, in.h.local_dim, k0)) {
      auto cells = base(in);
      for (auto x : {std::to_string(j), io::num(s), io::num(k0), io::num(mass), std::to_string(p.m),
                     std::to_string(p.k_prime), io::num(p.tail)})
        cells.push_back(x);
      sink.row("mps_tail.csv", "mps_toolkit",
               {"n_sites", "coupling", "cut", "entropy", "k0", "k0_mass", "m", "k_prime", "tail"}, cells);
    }
    for (int kp : cfg().k_prime) {
      const MatrixProductState m = state_to_mps(psi, in.n_sites, in.h.local_dim, kp, 0.0, cfg().max_dimension);
      double sum = 0.0;
      for (double d : m.discarded) sum += d;
      const double inf = infidelity(m.contract(), psi);
      const auto dims = m.bond_dims();
      const int chi = dims.empty() ? 1 : *std::max_element(dims.begin(), dims.end());
      if (inf > sum + 1e-10) ctx.fail(in.label() + ": truncation infidelity exceeds discarded weight");
      auto cells = base(in);
      for (auto x : {std::to_string(kp), io::num(inf), io::num(sum), std::to_string(chi)}) cells.push_back(x);
      sink.row("mps_truncation.csv", "mps_toolkit",
               {"n_sites", "coupling", "max_bond", "infidelity", "discarded_sum", "max_bond_dim"}, cells);
    }
  }

  // ---- locality
  std::optional<LocalityConstants> locality(std::optional<double> g, const std::string& coupling_label) {
    auto it = fits.find(coupling_label);
    if (it != fits.end()) return it->second;
    const int n = cfg().locality_n_sites;
    Hamiltonian1D h = cfg().model_file.empty() ? model(n, g) : load_model_file(cfg().model_file);
    if (h.dimension() > cfg().max_dimension) {
      ctx.skip("locality " + coupling_label + ": dimension exceeds budget");
      return std::nullopt;
    }
    DiagonalizationOptions opts;
    opts.degeneracy_tolerance = -1.0;
    const SpectralData sd = diagonalize(h, opts);
    const CMatrix z = pauli::z();
    const int d = h.local_dim;
    CMatrix a_local = d == 2 ? z : CMatrix(CMatrix::Identity(d, d));
    if (d != 2) a_local(0, 0) = -1.0;
    const LocalOperator a(h.n_sites, d, {1, 1}, a_local);
    std::vector<LocalOperator> bs;
    for (int s = 2; s <= h.n_sites; ++s) bs.emplace_back(h.n_sites, d, Interval{s, s}, a_local);
    const CommutatorProfile prof = lieb_robinson_scan(sd, a, bs, cfg().locality_times);
    for (const auto& r : prof.rows)
      sink.row("locality_profile.csv", "locality_probe", {"coupling", "t", "distance", "norm"},
               {g ? io::num(*g) : "", io::num(r.time), std::to_string(r.distance), io::num(r.norm)});
    double gap = sd.gap;
    if (!(gap > 0.0) || !std::isfinite(gap)) gap = 1.0;
    try {
      LocalityConstants lc = fit_locality_constants(prof, gap);
      std::ofstream js(ctx.path("locality_fit_" + std::to_string(fits.size()) + ".json"), std::ios::binary);
      write_fit_report(js, lc);
      sink.row("locality_fit.csv", "locality_probe",
               {"coupling", "v", "xi_c", "xi", "xi_prime", "c", "r_squared", "points"},
               {g ? io::num(*g) : "", io::num(lc.v), io::num(lc.xi_c), io::num(lc.xi), io::num(lc.xi_prime),
                io::num(lc.c), io::num(lc.diagnostics.r_squared), std::to_string(lc.diagnostics.points)});
      fits.emplace(coupling_label, lc);
      return lc;
    } catch (const FitError& e) {
      ctx.skip("locality " + coupling_label + ": " + e.what());
      return std::nullopt;
    }
  }

  std::string coupling_label(const Instance& in) const {
    return in.coupling_value ? in.coupling + "=" + io::num(*in.coupling_value) : "model";
  }

  std::optional<LocalityConstants> constants_for(const Instance& in) {
    if (cfg().velocity) {
      // xi_C is not measured in this case; 1 keeps xi = max(2 v / gap, 1)
      return make_locality_constants(*cfg().velocity, 1.0, in.sd.gap);
    }
    auto lc = locality(in.coupling_value, coupling_label(in));
    if (!lc) return std::nullopt;
    return make_locality_constants(lc->v, lc->xi_c, in.sd.gap, lc->c);
  }

  // ---- AGSP
  std::vector<std::pair<double, double>> agsp(const Instance& in) {
    std::vector<std::pair<double, double>> eps_by_l;
    const auto lc = constants_for(in);
    if (!lc) {
      ctx.skip(in.label() + ": no velocity for the AGSP");
      return eps_by_l;
    }
    const CVector psi = in.sd.ground_state();
    std::vector<int> js = cfg().j_list;
    if (js.empty()) js.push_back(in.n_sites / 2);
    AgspOptions opts;
    opts.v = lc->v;
    opts.xi = lc->xi;
    opts.bond.method = cfg().method;
    std::vector<std::string> header{"n_sites", "coupling"};
    auto h2 = cells_of([](std::ostream& o) { write_agsp_header(o); });
    header.insert(header.end(), h2.begin(), h2.end());
    for (auto x : {"o_b_norm", "o_b_scale", "q_expectation", "positivization_bound", "left_rank", "right_rank"})
      header.push_back(x);
    for (int j : js)
      for (int l : cfg().l_list) {
        if (l >= in.n_sites) continue;
        const std::string context = in.label() + ";j=" + std::to_string(j) + ";l=" + std::to_string(l);
        AgspResult r;
        try {
          r = build_agsp(in.h, in.sd, j, l, opts);
        } catch (const Error& e) {
          ctx.fail("agsp " + context + ": " + e.what());
          continue;
        }
        const AGSPTriple& t = r.triple;
        auto cells = base(in);
        auto c2 = cells_of([&](std::ostream& o) { write_agsp_row(o, r); });
        cells.insert(cells.end(), c2.begin(), c2.end());
        for (auto x : {io::num(t.o_b_norm), io::num(t.o_b_scale), io::num(t.q_expectation),
                       io::num(t.positivization.bound), std::to_string(r.left_rank), std::to_string(r.right_rank)})
          cells.push_back(x);
        sink.row("agsp.csv", "agsp_builder", header, cells);
        if (j == js.front()) eps_by_l.emplace_back(l, t.epsilon);

        const ChainMeasurement m = measure_chain(psi, t);
        auto mc = base(in);
        for (auto x : {std::to_string(j), std::to_string(l), io::num(m.p_overlap), io::num(m.x), io::num(m.x_plus),
                       io::num(m.y), io::num(m.p_plus), io::num(m.s_left), io::num(m.s_right), io::num(m.s_joint),
                       io::num(m.epsilon), io::num(m.epsilon_plus)})
          mc.push_back(x);
        sink.row("chain.csv", "agsp_builder",
                 {"n_sites", "coupling", "j", "l", "p_overlap", "x", "x_plus", "y", "p_plus", "s_left", "s_right",
                  "s_joint", "epsilon", "epsilon_plus"},
                 mc);

        ChainReport rep;
        rep.checks.push_back({"expectation_o_b", 1.0 - 2.0 * t.epsilon, t.o_b_expectation,
                              t.o_b_expectation - (1.0 - 2.0 * t.epsilon), true, true});
        rep.checks.push_back({"expectation_o_l_o_r", 1.0 - 2.0 * t.epsilon, t.q_expectation,
                              t.q_expectation - (1.0 - 2.0 * t.epsilon), true, true});
        rep.checks.push_back({"positivization", t.positivization.bound, t.epsilon_plus,
                              t.positivization.bound - t.epsilon_plus, true, true});
        const MeasurementBound lu = lindblad_uhlmann_from_values(m.mutual_information(), m.p_plus, m.x_plus);
        rep.checks.push_back({"lindblad_uhlmann_measured", lu.classical, lu.relative_entropy, lu.slack, true, true});
        const auto xb = xbd_chain_check(std::clamp(m.p_overlap, 0.0, 1.0), std::clamp(m.x_plus, 0.0, 1.0),
                                        std::clamp(m.y, 0.0, 1.0), std::clamp(m.epsilon_plus, 0.0, 1.0));
        const auto rg = relent_gap_check(m.s_left, m.s_right, m.s_joint, std::clamp(m.x_plus, 0.0, 1.0),
                                         std::clamp(m.epsilon_plus, 0.0, 1.0), cfg().c2);
        rep.checks.insert(rep.checks.end(), xb.checks.begin(), xb.checks.end());
        rep.checks.insert(rep.checks.end(), rg.checks.begin(), rg.checks.end());
        ctx.add("agsp", context, rep);
      }
    return eps_by_l;
  }

  // ---- bounds
  void bounds(const Instance& in, const std::vector<std::pair<double, double>>& eps_by_l) {
    const auto lc = constants_for(in);
    if (!lc) {
      ctx.skip(in.label() + ": bounds need locality constants");
      return;
    }
    const int d = in.h.local_dim;
    if (d < 2) return;
    BoundParameters p = bound_parameters(*lc, d, in.h.j_bound, in.sd.gap, 1.0);
    p.c0 = cfg().c0;
    p.c2 = cfg().c2;
    if (cfg().xi_prime) p.xi_prime = *cfg().xi_prime;
    if (cfg().c1) {
      p.c1 = *cfg().c1;
    } else if (eps_by_l.size() >= 2) {
      std::vector<double> ls, es;
      for (auto [l, e] : eps_by_l) {
        ls.push_back(l);
        es.push_back(e);
      }
      try {
        p.c1 = std::exp(fit_c1(ls, es).intercept);
      } catch (const NumericalError&) {
        p.c1 = 1.0;
      }
    }
    const std::string context = in.label();
    ChainReport rep;

    const CVector psi = in.sd.ground_state();
    std::vector<double> cuts;
    for (int j = 1; j < in.n_sites; ++j) cuts.push_back(schmidt_cut(psi, in.n_sites, d, j).entropy());
    const double smax = p.xi_prime > 1.0 ? s_max(p) : INFINITY;
    for (const auto& c : entropy_profile_check(cuts, smax, d).checks) rep.checks.push_back(c);
    const double smax_cut = *std::max_element(cuts.begin(), cuts.end());
    rep.checks.push_back({"theorem_ceiling", smax, smax_cut, smax - smax_cut, true, false});

    std::vector<double> s_l;
    for (int l = 1; 2 * l <= in.n_sites; ++l) {
      double best = 0.0;
      for (int a = 1; a + l - 1 <= in.n_sites; ++a)
        best = std::max(best, entropy_of(interval_spectrum(psi, in.n_sites, d, {a, a + l - 1})));
      s_l.push_back(best);
    }
    for (const auto& c : subadditivity_check(s_l).checks) rep.checks.push_back(c);

    const CutData mid = schmidt_cut(psi, in.n_sites, d, in.n_sites / 2);
    for (int k : cfg().k_prime) {
      const double overlap = mid.weights().head(std::min<Index>(k, mid.weights().size())).sum();
      const double b = bootstrap_bound(k, std::min(1.0, overlap), p);
      rep.checks.push_back({"bootstrap_k" + std::to_string(k), b, mid.entropy(), b - mid.entropy(), true, false});
    }
    for (double a : cfg().alphas) {
      const auto rc = renyi_convergence_ok(a, p);
      rep.checks.push_back({"renyi_alpha_star_" + io::num(a), rc.alpha_star, a, a - rc.alpha_star, true, false});
    }
    if (2.0 * p.c1 > 1.0) {
      const double xi0 = 2.0 * p.xi_prime * std::log(2.0 * p.c1);
      const ClaimIteration it = claim_iteration(xi0 * std::log(double(d)), xi0, p);
      for (const auto& st : it.steps)
        sink.row("claim_iteration.csv", "bounds_harness", {"context", "n", "l", "recursion", "closed_form"},
                 {context, std::to_string(st.n), io::num(st.l), io::num(st.recursion), io::num(st.closed_form)});
      rep.checks.push_back({"claim_l0_formula", it.l0_formula, it.l0_closed_form, it.l0_formula - it.l0_closed_form,
                            it.l0_closed_form > 0.0, false});
      rep.checks.push_back({"claim_recursion_vs_closed_form", 0.0, it.max_step_mismatch, -it.max_step_mismatch,
                            !it.steps.empty(), false});
      rep.checks.push_back({"s_max_iteration_form", s_max_from_iteration(p), smax_cut,
                            s_max_from_iteration(p) - smax_cut, true, false});
    } else {
      ctx.note(context + ": 2 C1 <= 1, claim iteration skipped");
    }
    ctx.add("bounds", context, rep);

    auto cells = base(in);
    for (auto x : {io::num(p.xi), io::num(p.xi_prime), io::num(p.c0), io::num(p.c1), io::num(p.c2), io::num(p.v),
                   io::num(p.delta_e), io::num(p.j_coupling), io::num(smax)})
      cells.push_back(x);
    sink.row("bound_parameters.csv", "bounds_harness",
             {"n_sites", "coupling", "xi", "xi_prime", "c0", "c1", "c2", "v", "delta_e", "j_coupling", "s_max"},
             cells);
  }

  // ---- expander
  void expander() {
    const ExperimentConfig& c = cfg();
    for (const auto& spec : c.expanders) {
      const std::string tag = "k=" + std::to_string(spec.k) + ";d=" + std::to_string(spec.d) +
                              ";seed=" + std::to_string(spec.seed);
      const std::vector<std::string> header{"k", "d", "seed", "n_sites", "boundary", "interval_first",
                                            "interval_length", "deviation", "entropy", "regime_ok",
                                            "distinct_products", "structure_ok", "graph_attempts", "error"};
      const std::vector<std::string> key{std::to_string(spec.k), std::to_string(spec.d), std::to_string(spec.seed)};
      ExpanderMPS e;
      try {
        e = build_expander_mps(spec.k, spec.d, spec.seed, c.amplitude);
      } catch (const Error& err) {
        auto cells = key;
        cells.push_back(std::to_string(c.expander_n_sites));
        cells.resize(cells.size() + 9);
        cells.push_back(sanitize(err.what()));
        sink.row("expander.csv", "mps_toolkit", header, cells);
        ctx.skip("expander " + tag + ": " + err.what());
        continue;
      }
      const std::string structure = e.structure_error();
      if (!structure.empty()) ctx.fail("expander " + tag + ": " + structure);
      std::ofstream edges(ctx.path("expander_k" + std::to_string(spec.k) + "_d" + std::to_string(spec.d) + "_s" +
                                   std::to_string(spec.seed) + ".edges"),
                          std::ios::binary);
      write_edge_list(edges, e);
      for (int len : c.interval_lengths)
        for (auto boundary : {ExpanderBoundary::periodic, ExpanderBoundary::open}) {
          const int first = c.expander_n_sites / 2;
          const Interval x{first, std::min(c.expander_n_sites, first + len - 1)};
          auto cells = key;
          cells.push_back(std::to_string(c.expander_n_sites));
          cells.push_back(boundary == ExpanderBoundary::periodic ? "periodic" : "open");
          cells.push_back(std::to_string(x.first));
          cells.push_back(std::to_string(x.length()));
          try {
            const ExpanderRdm r = expander_interval_rdm(e, c.expander_n_sites, x, boundary);
            for (auto v : {io::num(r.deviation), io::num(r.entropy), std::string(r.regime_ok ? "1" : "0"),
                           std::to_string(r.distinct_products), std::string(structure.empty() ? "1" : "0"),
                           std::to_string(e.graph_attempts), std::string()})
              cells.push_back(v);
          } catch (const Error& err) {
            for (int i = 0; i < 6; ++i) cells.push_back("");
            cells.push_back(sanitize(err.what()));
            ctx.skip("expander " + tag + ": " + err.what());
          }
          sink.row("expander.csv", "mps_toolkit", header, cells);
        }
      if (c.probe_trials > 0) {
        try {
          const CVector psi = expander_state(e, c.probe_n_sites);
          const auto rows = conjecture_probe(psi, c.probe_n_sites, e.d, c.probe_l, c.probe_trials,
                                             c.seed ^ spec.seed, c.probe_xi_prime);
          std::vector<std::string> ph{"k", "d", "seed", "n_sites"};
          auto h2 = cells_of([](std::ostream& o) { write_probe_header(o); });
          ph.insert(ph.end(), h2.begin(), h2.end());
          for (const auto& r : rows) {
            auto cells = key;
            cells.push_back(std::to_string(c.probe_n_sites));
            auto c2 = cells_of([&](std::ostream& o) { write_probe_row(o, r); });
            cells.insert(cells.end(), c2.begin(), c2.end());
            sink.row("probe.csv", "mps_toolkit", ph, cells);
          }
        } catch (const Error& err) {
          ctx.skip("probe " + tag + ": " + err.what());
        }
      }
    }
  }
};

void write_summary(const RunContext& ctx, int exit_code) {
  json s;
  s["name"] = ctx.config().name;
  s["config_hash"] = ctx.config().hash;
  s["version"] = kVersion;
  s["exit_code"] = exit_code;
  s["failures"] = ctx.failures();
  s["skipped"] = ctx.skipped();
  json margins = json::array();
  double worst = INFINITY;
  for (const auto& m : ctx.margins()) {
    const auto& c = m.check;
    margins.push_back({{"source", m.source},
                       {"context", m.context},
                       {"quantity", c.name},
                       {"formula_value", io::num(c.formula)},
                       {"measured_value", io::num(c.measured)},
                       {"slack", io::num(c.slack)},
                       {"applicable", c.applicable},
                       {"exact", c.exact}});
    if (c.applicable && c.exact) worst = std::min(worst, c.slack);
  }
  s["margins"] = margins;
  s["min_exact_slack"] = io::num(worst);
  std::ofstream out(ctx.path("summary.json"), std::ios::binary);
  out << s.dump(2) << "\n";
}

} // namespace

void run_area_law_sweep(RunContext& ctx) {
  Pipeline p(ctx);
  p.for_each_instance([&](const Instance& in) { p.area_law(in); });
}

void run_agsp_sweep(RunContext& ctx) {
  Pipeline p(ctx);
  p.for_each_instance([&](const Instance& in) { p.agsp(in); });
}

void run_expander_suite(RunContext& ctx) {
  Pipeline p(ctx);
  p.expander();
}

void run_bounds(RunContext& ctx) {
  Pipeline p(ctx);
  p.for_each_instance([&](const Instance& in) { p.bounds(in, {}); });
}

RunOutcome run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream snap(cfg.output_dir / "config.snapshot", std::ios::binary);
    snap << cfg.snapshot.dump(2) << "\n";
  }
  omp_set_num_threads(cfg.workers);
  RunContext ctx(cfg, log);
  Pipeline p(ctx);
  const bool chain_tasks = has_task(cfg, "area_law") || has_task(cfg, "mps") || has_task(cfg, "agsp") ||
                           has_task(cfg, "bounds");
  if (chain_tasks) {
    p.for_each_instance([&](const Instance& in) {
      ctx.note("instance " + in.label());
      if (has_task(cfg, "area_law")) p.area_law(in);
      if (has_task(cfg, "mps")) p.mps(in);
      std::vector<std::pair<double, double>> eps;
      if (has_task(cfg, "agsp")) eps = p.agsp(in);
      if (has_task(cfg, "bounds")) p.bounds(in, eps);
    });
  }
  if (has_task(cfg, "locality") && !chain_tasks) {
    if (cfg.couplings.empty())
      p.locality(std::nullopt, "model");
    else
      for (double g : cfg.couplings) p.locality(g, cfg.coupling_name + "=" + io::num(g));
  } else if (has_task(cfg, "locality")) {
    for (double g : cfg.couplings) p.locality(g, cfg.coupling_name + "=" + io::num(g));
    if (cfg.couplings.empty()) p.locality(std::nullopt, "model");
  }
  if (has_task(cfg, "expander")) p.expander();

  for (const auto& m : ctx.margins()) {
    const auto& c = m.check;
    p.sink.row("bounds.csv", "bounds_harness",
               {"source", "context", "quantity", "formula_value", "measured_value", "slack", "applicable", "exact"},
               {m.source, m.context, c.name, io::num(c.formula), io::num(c.measured), io::num(c.slack),
                c.applicable ? "1" : "0", c.exact ? "1" : "0"});
  }

  RunOutcome out;
  out.failures = ctx.failures();
  out.skipped = ctx.skipped();
  out.exit_code = out.failures.empty() ? 0 : 1;
  write_summary(ctx, out.exit_code);
  return out;
}

// ---------------------------------------------------------------------------

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      t.header = split_cells(line);
      first = false;
    } else {
      t.rows.push_back(split_cells(line));
    }
  }
  return t;
}

CheckOutcome check_run(const std::filesystem::path& dir) {
  CheckOutcome out;
  auto fail = [&](const std::string& s) { out.failures.push_back(s); };
  if (!std::filesystem::exists(dir / "config.snapshot")) throw ConfigError("not a run directory: " + dir.string());
  json snap;
  {
    std::ifstream in(dir / "config.snapshot");
    snap = json::parse(in);
  }
  const ExperimentConfig cfg = parse_config(snap);
  if (!std::filesystem::exists(dir / "summary.json")) fail("summary.json missing");

  auto table = [&](const std::string& name) -> std::optional<CsvTable> {
    if (!std::filesystem::exists(dir / name)) return std::nullopt;
    CsvTable t = read_csv(dir / name);
    const int h = t.column("config_hash");
    for (const auto& r : t.rows) {
      ++out.checked;
      if (h < 0 || r.size() != t.header.size()) {
        fail(name + ": malformed row");
        continue;
      }
      if (r[h] != cfg.hash) fail(name + ": config hash " + r[h] + " does not match snapshot " + cfg.hash);
    }
    return t;
  };
  auto num = [](const CsvTable& t, const std::vector<std::string>& r, const std::string& col) {
    const int c = t.column(col);
    if (c < 0) throw Error("missing column " + col);
    return parse_double(r[c]);
  };

  if (auto t = table("bounds.csv")) {
    for (const auto& r : t->rows)
      if (r[t->column("applicable")] == "1" && r[t->column("exact")] == "1" && !(num(*t, r, "slack") >= -1e-9))
        fail("bounds.csv: " + r[t->column("context")] + " " + r[t->column("quantity")] + " slack " +
             r[t->column("slack")]);
  }
  if (auto t = table("entropy_profile.csv")) {
    std::map<std::string, std::vector<std::pair<int, const std::vector<std::string>*>>> groups;
    for (const auto& r : t->rows)
      groups[r[t->column("n_sites")] + "|" + r[t->column("coupling")]].emplace_back(
          std::stoi(r[t->column("cut")]), &r);
    std::vector<std::pair<double, int>> alpha_cols;
    for (std::size_t i = 0; i < t->header.size(); ++i)
      if (t->header[i].rfind("S_alpha=", 0) == 0) alpha_cols.emplace_back(std::stod(t->header[i].substr(8)), int(i));
    std::sort(alpha_cols.begin(), alpha_cols.end());
    for (auto& [key, rows] : groups) {
      std::sort(rows.begin(), rows.end());
      const double lnd = std::log(num(*t, *rows.front().second, "local_dim"));
      double prev = 0.0;
      for (const auto& [cut, r] : rows) {
        const double s = num(*t, *r, "S");
        if (s < -1e-12) fail("entropy_profile.csv: negative entropy at " + key);
        if (std::abs(s - prev) > lnd + 1e-9) fail("entropy_profile.csv: increment above ln D at " + key);
        prev = s;
        double last = INFINITY;
        for (const auto& [alpha, col] : alpha_cols) {
          const double v = parse_double((*r)[col]);
          if (v > last + 1e-9) fail("entropy_profile.csv: Renyi entropy increasing in alpha at " + key);
          last = v;
          if ((alpha < 1.0 && v < s - 1e-9) || (alpha > 1.0 && v > s + 1e-9))
            fail("entropy_profile.csv: Renyi entropy on the wrong side of S at " + key);
        }
      }
      if (prev > lnd + 1e-9) fail("entropy_profile.csv: last cut above ln D at " + key);
    }
  }
  if (auto t = table("agsp.csv")) {
    for (const auto& r : t->rows) {
      const double e = num(*t, r, "epsilon");
      if (!(e >= 0.0)) fail("agsp.csv: negative or missing epsilon");
      if (num(*t, r, "ob_gs") < 1.0 - 2.0 * e - 1e-9) fail("agsp.csv: <O_B> below 1 - 2 epsilon");
    }
  }
  if (auto t = table("mps_tail.csv")) {
    std::map<std::string, double> last;
    for (const auto& r : t->rows) {
      const std::string key = r[t->column("n_sites")] + "|" + r[t->column("coupling")];
      const double tail = num(*t, r, "tail");
      if (last.count(key) && tail > last[key] + 1e-12) fail("mps_tail.csv: tail increases with k' at " + key);
      last[key] = tail;
      if (num(*t, r, "k0_mass") < 0.5 - 1e-12) fail("mps_tail.csv: k0 mass below 1/2 at " + key);
    }
  }
  if (auto t = table("mps_truncation.csv")) {
    for (const auto& r : t->rows)
      if (num(*t, r, "infidelity") > num(*t, r, "discarded_sum") + 1e-10)
        fail("mps_truncation.csv: infidelity exceeds discarded weight");
  }
  if (auto t = table("expander.csv")) {
    for (const auto& r : t->rows) {
      if (!r[t->column("error")].empty()) continue;
      if (r[t->column("structure_ok")] != "1") fail("expander.csv: invalid graph structure");
      const double dev = num(*t, r, "deviation");
      const double s = num(*t, r, "entropy");
      const double cap = num(*t, r, "interval_length") * std::log(num(*t, r, "d"));
      if (dev < -1e-12 || s < -1e-12 || s > cap + 1e-9) fail("expander.csv: RDM outside physical range");
    }
  }
  if (auto t = table("probe.csv")) {
    for (const auto& r : t->rows)
      if (num(*t, r, "max_functional") > 2.0 + 1e-9) fail("probe.csv: correlator above 2");
  }
  for (const char* name : {"spectra.csv", "locality_profile.csv", "locality_fit.csv", "chain.csv",
                           "claim_iteration.csv", "bound_parameters.csv"})
    table(name);
  return out;
}

void export_run(const std::filesystem::path& dir, const std::string& format, std::ostream& out) {
  if (format != "csv") throw ConfigError("unsupported export format '" + format + "'");
  std::ifstream in(dir / "summary.json");
  if (!in) throw ConfigError("no summary.json in " + dir.string());
  const json s = json::parse(in);
  io::write_row(out, {"config_hash", "source", "context", "quantity", "formula_value", "measured_value", "slack",
                      "applicable", "exact", "status"});
  for (const auto& m : s.at("margins")) {
    const bool applicable = m.at("applicable").get<bool>();
    const bool exact = m.at("exact").get<bool>();
    const double slack = parse_double(m.at("slack").get<std::string>());
    std::string status = !applicable ? "n/a" : slack >= -1e-9 ? "ok" : exact ? "violated" : "margin";
    io::write_row(out, {s.at("config_hash").get<std::string>(), m.at("source").get<std::string>(),
                        m.at("context").get<std::string>(), m.at("quantity").get<std::string>(),
                        m.at("formula_value").get<std::string>(), m.at("measured_value").get<std::string>(),
                        m.at("slack").get<std::string>(), applicable ? "1" : "0", exact ? "1" : "0", status});
  }
}

} // namespace arealaw
