#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arealaw/errors.hpp"
#include "arealaw/experiment.hpp"

using namespace arealaw;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("arealaw_" + name);
  fs::remove_all(p);
  return p;
}

json small_config(const fs::path& out) {
  json j = json::parse(R"({
    "name": "small",
    "seed": 5,
    "tasks": ["area_law", "mps", "agsp", "bounds"],
    "model": {"family": "transverse_ising", "params": {"J": 1.0}},
    "sweep": {"n_sites": [6], "coupling": {"name": "h", "values": [2.0]}, "l": [2], "k_prime": [1, 2]},
    "agsp": {"velocity": 4.0}
  })");
  j["output_dir"] = out.string();
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const int status = std::system((std::string(AREALAW_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, RejectsSchemaAndRangeErrors) {
  const fs::path out = scratch("cfg");
  json j = small_config(out);
  j["bogus"] = 1;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = small_config(out);
  j["sweep"]["l"] = json::array({6});
  EXPECT_THROW(parse_config(j), ConfigError);
  j = small_config(out);
  j["tasks"] = json::array({"area_law", "teleport"});
  EXPECT_THROW(parse_config(j), ConfigError);
  j = small_config(out);
  j["model"]["family"] = "hubbard";
  EXPECT_THROW(parse_config(j), ConfigError);
  EXPECT_THROW(load_config(out / "missing.json"), ConfigError);
}

TEST(Config, HashIgnoresOutputDir) {
  const auto a = parse_config(small_config("/tmp/a"));
  const auto b = parse_config(small_config("/tmp/b"));
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.hash.size(), 16u);
  json j = small_config("/tmp/a");
  j["seed"] = 6;
  EXPECT_NE(parse_config(j).hash, a.hash);
}

TEST(Run, EmptySweepSucceeds) {
  const fs::path out = scratch("empty");
  json j = small_config(out);
  j["sweep"]["n_sites"] = json::array();
  const auto res = run_experiment(parse_config(j));
  EXPECT_EQ(res.exit_code, 0);
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "config.snapshot"));
  EXPECT_FALSE(fs::exists(out / "spectra.csv"));
  EXPECT_TRUE(check_run(out).failures.empty());
}

TEST(Run, DegenerateModelIsSkipped) {
  const fs::path out = scratch("degenerate");
  json j = small_config(out);
  j["sweep"]["coupling"]["values"] = json::array({0.0});
  const auto res = run_experiment(parse_config(j));
  EXPECT_EQ(res.exit_code, 0);
  ASSERT_FALSE(res.skipped.empty());
  EXPECT_NE(res.skipped[0].find("gap check fails"), std::string::npos);
}

TEST(Run, BudgetSkip) {
  const fs::path out = scratch("budget");
  json j = small_config(out);
  j["budget"] = {{"max_dimension", 32}};
  const auto res = run_experiment(parse_config(j));
  ASSERT_FALSE(res.skipped.empty());
  EXPECT_NE(res.skipped[0].find("exceeds budget"), std::string::npos);
}

TEST(Run, DeterministicCheckAndExport) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const auto ca = load_config(fs::path(AREALAW_CONFIG_DIR) / "smoke.json", {"output_dir=" + a.string()});
  const auto cb = load_config(fs::path(AREALAW_CONFIG_DIR) / "smoke.json", {"output_dir=" + b.string()});
  ASSERT_EQ(run_experiment(ca).exit_code, 0);
  ASSERT_EQ(run_experiment(cb).exit_code, 0);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 8);

  const auto ok = check_run(a);
  EXPECT_GT(ok.checked, 0);
  EXPECT_TRUE(ok.failures.empty());

  std::ostringstream table;
  export_run(a, "csv", table);
  EXPECT_EQ(table.str().find("violated"), std::string::npos);
  EXPECT_THROW(export_run(a, "xml", table), ConfigError);

  // a forged epsilon puts <O_B> below 1 - 2 epsilon; re-check must notice
  CsvTable t = read_csv(b / "agsp.csv");
  const int col = t.column("epsilon");
  ASSERT_GE(col, 0);
  t.rows[0][col] = "0";
  std::ofstream w(b / "agsp.csv");
  for (std::size_t i = 0; i < t.header.size(); ++i) w << (i ? "," : "") << t.header[i];
  w << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) w << (i ? "," : "") << r[i];
    w << "\n";
  }
  w.close();
  EXPECT_FALSE(check_run(b).failures.empty());
}

TEST(Run, ExpanderErrorIsReported) {
  const fs::path out = scratch("expander");
  json j = small_config(out);
  j["tasks"] = json::array({"expander"});
  j["expander"] = {{"graphs", json::array({{{"k", 16}, {"d", 2}, {"seed", 1}}})}, {"n_sites", 6}};
  const auto res = run_experiment(parse_config(j));
  EXPECT_EQ(res.exit_code, 0);
  const CsvTable t = read_csv(out / "expander.csv");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_FALSE(t.rows[0][t.column("error")].empty());
  EXPECT_TRUE(check_run(out).failures.empty());
}

TEST(Cli, ExitCodes) {
  const fs::path out = scratch("cli");
  const std::string smoke = std::string(AREALAW_CONFIG_DIR) + "/smoke.json";
  EXPECT_EQ(cli("run -q " + smoke + " --set output_dir=" + out.string()), 0);
  EXPECT_EQ(cli("check " + out.string()), 0);
  EXPECT_EQ(cli("export " + out.string() + " --format csv"), 0);
  EXPECT_EQ(cli("export " + out.string() + " --format xml"), 2);
  EXPECT_EQ(cli("run -q " + smoke + " --set sweep.l=[9]"), 2);
  EXPECT_EQ(cli("run -q " + smoke + " --set nonsense=1"), 2);
  EXPECT_EQ(cli("run -q /nonexistent.json"), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("bounds --xi-prime 6 --d 2"), 0);
}
