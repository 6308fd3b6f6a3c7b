#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arealaw/agsp.hpp"
#include "arealaw/bounds.hpp"
#include "arealaw/mps.hpp"

namespace arealaw {

inline constexpr const char* kVersion = "0.1.0";

struct ExpanderSpec {
  int k = 0;
  int d = 3;
  uint64_t seed = 1;
};

// Parsed form of the JSON run configuration; see README for the schema.
struct ExperimentConfig {
  std::string name = "run";
  uint64_t seed = 1;
  std::filesystem::path output_dir = "run";
  Index max_dimension = Index(1) << 12;
  int workers = 1;
  std::vector<std::string> tasks;

  std::string family = "transverse_ising";
  ModelParams params;
  std::string coupling_name;
  std::vector<double> couplings; // empty: params as given
  std::filesystem::path model_file;

  std::vector<int> n_sites;
  std::vector<int> j_list; // empty: N/2
  std::vector<int> l_list;
  std::vector<int> k_prime;
  std::vector<double> alphas;

  std::optional<double> velocity; // unset: fitted from commutator growth
  PropagatorMethod method = PropagatorMethod::spectral;
  int locality_n_sites = 8;
  std::vector<double> locality_times;

  double c0 = 1.0;
  double c2 = 1.0;
  std::optional<double> c1;
  std::optional<double> xi_prime;

  std::vector<ExpanderSpec> expanders;
  int expander_n_sites = 10;
  std::vector<int> interval_lengths{1, 2};
  int probe_trials = 0;
  int probe_n_sites = 8;
  std::vector<int> probe_l{1, 2};
  std::vector<double> probe_xi_prime{2.0, 6.0};
  AmplitudeRule amplitude = AmplitudeRule::uniform;

  nlohmann::json snapshot; // normalized config, written as config.snapshot
  std::string hash;
};

bool has_task(const ExperimentConfig& cfg, const std::string& task);

// Throws ConfigError on schema or precondition violations.
ExperimentConfig parse_config(const nlohmann::json& j);
// `overrides` are key.path=value assignments applied before parsing.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

struct Margin {
  std::string source;
  std::string context;
  InequalityCheck check;
};

// Collects margins, failures and skip reasons while the tasks write their CSVs.
class RunContext {
public:
  RunContext(const ExperimentConfig& cfg, std::ostream* log = nullptr);

  const ExperimentConfig& config() const { return cfg_; }
  std::filesystem::path path(const std::string& file) const { return cfg_.output_dir / file; }
  std::vector<std::string> prefix(const std::string& module) const;

  void add(const std::string& source, const std::string& context, const ChainReport& r);
  void fail(const std::string& what);
  void skip(const std::string& what);
  void note(const std::string& what);

  const std::vector<Margin>& margins() const { return margins_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& skipped() const { return skipped_; }

private:
  const ExperimentConfig& cfg_;
  std::ostream* log_;
  std::vector<Margin> margins_;
  std::vector<std::string> failures_;
  std::vector<std::string> skipped_;
};

void run_area_law_sweep(RunContext& ctx);
void run_agsp_sweep(RunContext& ctx);
void run_expander_suite(RunContext& ctx);
void run_bounds(RunContext& ctx);

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> failures;
  std::vector<std::string> skipped;
};

// Writes config.snapshot, the task CSVs and summary.json into cfg.output_dir.
RunOutcome run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct CheckOutcome {
  int checked = 0;
  std::vector<std::string> failures;
};

// Re-verifies the exact invariants from the persisted CSVs of a run directory.
CheckOutcome check_run(const std::filesystem::path& dir);

// All margins of a run as one CSV table.
void export_run(const std::filesystem::path& dir, const std::string& format, std::ostream& out);

// Minimal CSV reader for the files written here (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const; // -1 if missing
};
CsvTable read_csv(const std::filesystem::path& path);

} // namespace arealaw
