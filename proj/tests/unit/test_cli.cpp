#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log = {}) {
  std::string cmd = std::string(OSCNET_CLI_PATH) + " " + args;
  cmd += log.empty() ? " > /dev/null 2>&1" : " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return std::string(OSCNET_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("oscnet_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, HelpAndFixturesExitZero) {
  EXPECT_EQ(run_cli("--help"), 0);
  const auto dir = scratch("fixtures");
  EXPECT_EQ(run_cli("fixtures", dir / "log.txt"), 0);
  const auto text = slurp(dir / "log.txt");
  EXPECT_NE(text.find("fig2_chain11"), std::string::npos);
  EXPECT_NE(text.find("controlled=no"), std::string::npos);
}

TEST(Cli, BadArgumentsExitOne) {
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("check"), 1);  // --config missing
  EXPECT_EQ(run_cli("check --config /nonexistent.json"), 1);
  EXPECT_EQ(run_cli("check --config " + config("check_chain11.json") + " --threads 0"), 1);
  // command line and config disagree
  EXPECT_EQ(run_cli("simulate --config " + config("check_chain11.json") + " --out " + scratch("mismatch").string()), 1);
}

TEST(Cli, InvalidConfigExitsOneWithPointedMessage) {
  const auto dir = scratch("invalid");
  std::ofstream(dir / "bad.json") << R"({"model": {"topology": {"vertices": ["a"], "baths": ["a"]},
    "pinning": {"family": "quadratic", "stiffness": 1.0}},
    "experiment": {"command": "lyapunov-scan", "theta": 2.0, "energy_grid": [10, 20, 30]}})";
  EXPECT_EQ(run_cli("lyapunov-scan --config " + (dir / "bad.json").string() + " --out " + (dir / "out").string(),
                    dir / "log.txt"),
            1);
  EXPECT_NE(slurp(dir / "log.txt").find("theta*T_max must be < 1"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "report.json"));
}

TEST(Cli, CheckWritesManifestAndReport) {
  const auto dir = scratch("check");
  ASSERT_EQ(run_cli("check --config " + config("check_chain11.json") + " --out " + dir.string()), 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "check");
  EXPECT_EQ(manifest["status"], "complete");
  EXPECT_EQ(manifest["exit_status"], 0);
  EXPECT_TRUE(manifest.contains("config_hash"));
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["partial"], false);
  EXPECT_TRUE(fs::exists(dir / "timing.json"));
}

TEST(Cli, SeedOverrideChangesOutputAndRerunReproducesIt) {
  const auto a = scratch("seed_a"), b = scratch("seed_b"), c = scratch("seed_c");
  const std::string cfg = "simulate --config " + config("simulate_soft_chain3.json");
  ASSERT_EQ(run_cli(cfg + " --seed 5 --out " + a.string()), 0);
  ASSERT_EQ(run_cli(cfg + " --seed 5 --threads 3 --out " + b.string()), 0);
  ASSERT_EQ(run_cli(cfg + " --seed 6 --out " + c.string()), 0);
  for (const char* f : {"manifest.json", "report.json", "trace_simulate.csv", "trace_states.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_NE(slurp(a / "trace_simulate.csv"), slurp(c / "trace_simulate.csv"));
}

TEST(Cli, CounterexampleRunsCleanly) {
  const auto dir = scratch("c4");
  ASSERT_EQ(run_cli("counterexample-c4 --config " + config("counterexample_c4.json") + " --out " + dir.string()), 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  const auto& c4 = report["counterexample"];
  EXPECT_EQ(c4["inside_validity_region"], true);
  EXPECT_EQ(c4["x2_non_increasing"], true);
  EXPECT_LT(c4["x2_final"].get<double>(), 3.5);
}

TEST(Cli, BlowupExitsTwoWithPartialReport) {
  const auto dir = scratch("blowup");
  std::ofstream(dir / "unstable.json") << R"({"model": {"topology": {"vertices": ["a", "b"], "edges": [["a", "b"]],
    "baths": ["a"]}, "pinning": {"family": "quadratic", "stiffness": 1.0},
    "interaction": {"family": "quadratic", "stiffness": 1.0}},
    "integrator": {"h": 3.0},
    "experiment": {"command": "simulate", "t_end": 3000, "initial": {"kind": "energy", "energy": 5}}})";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "unstable.json").string() + " --out " + (dir / "out").string()), 2);
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  EXPECT_EQ(report["partial"], true);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "out" / "manifest.json"))["status"], "partial");
}
