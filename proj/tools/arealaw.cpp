#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arealaw/bounds.hpp"
#include "arealaw/errors.hpp"
#include "arealaw/experiment.hpp"
#include "arealaw/io.hpp"

namespace {

int run(const std::string& config, const std::vector<std::string>& overrides, bool quiet) {
  const arealaw::ExperimentConfig cfg = arealaw::load_config(config, overrides);
  const auto out = arealaw::run_experiment(cfg, quiet ? nullptr : &std::cerr);
  std::cout << cfg.output_dir.string() << ": " << out.failures.size() << " failures, " << out.skipped.size()
            << " skipped\n";
  return out.exit_code;
}

int check(const std::string& dir) {
  const auto out = arealaw::check_run(dir);
  for (const auto& f : out.failures) std::cout << "FAIL " << f << "\n";
  std::cout << out.checked << " rows checked, " << out.failures.size() << " failures\n";
  return out.failures.empty() ? 0 : 1;
}

int bounds(double xi_prime, int d, double c0, double c1, double c2) {
  arealaw::BoundParameters p;
  p.xi_prime = xi_prime;
  p.d = d;
  p.c0 = c0;
  p.c1 = c1;
  p.c2 = c2;
  using arealaw::io::num;
  std::cout << "s_max," << num(arealaw::s_max(p)) << "\n";
  std::cout << "f_term," << num(arealaw::f_term(xi_prime, d)) << "\n";
  std::cout << "alpha_star," << num(arealaw::renyi_convergence_ok(1.0, p).alpha_star) << "\n";
  if (2.0 * c1 > 1.0) {
    const auto it = arealaw::claim_iteration(0.0, 1e300, p, 0);
    std::cout << "xi0," << num(it.xi0) << "\n";
    std::cout << "l0_formula," << num(it.l0_formula) << "\n";
    std::cout << "s_max_iteration," << num(arealaw::s_max_from_iteration(p)) << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Area-law experiments for gapped 1D chains"};
  app.set_version_flag("--version", arealaw::kVersion);
  app.require_subcommand(1);

  std::string config, dir, format = "csv";
  std::vector<std::string> overrides;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run_cmd->add_option("config", config, "Config file")->required();
  run_cmd->add_option("--set", overrides, "Override a config value, key.path=value");
  run_cmd->add_flag("-q,--quiet", quiet, "No progress log on stderr");

  auto* check_cmd = app.add_subcommand("check", "Re-verify invariants from a run directory");
  check_cmd->add_option("run_dir", dir, "Run directory")->required();

  auto* export_cmd = app.add_subcommand("export", "Write the margins table of a run to stdout");
  export_cmd->add_option("run_dir", dir, "Run directory")->required();
  export_cmd->add_option("--format", format, "Output format (csv)");

  double xi_prime = 6.0, c0 = 1.0, c1 = 1.0, c2 = 1.0;
  int d = 2;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the closed-form bounds for given constants");
  bounds_cmd->add_option("--xi-prime", xi_prime);
  bounds_cmd->add_option("--d", d);
  bounds_cmd->add_option("--c0", c0);
  bounds_cmd->add_option("--c1", c1);
  bounds_cmd->add_option("--c2", c2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run(config, overrides, quiet);
    if (*check_cmd) return check(dir);
    if (*export_cmd) {
      arealaw::export_run(dir, format, std::cout);
      return 0;
    }
    if (*bounds_cmd) return bounds(xi_prime, d, c0, c1, c2);
  } catch (const arealaw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
