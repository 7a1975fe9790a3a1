#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oscnet/config.hpp"
#include "oscnet/runner.hpp"

using namespace oscnet;

namespace {

const char* kMinimal = R"({
  "seed": 4,
  "model": {
    "topology": {"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]], "baths": ["a", "c"]},
    "baths": {"a": {"gamma": 1.0, "temperature": 1.0}, "c": {"gamma": 1.0, "temperature": 2.0}},
    "pinning": {"family": "quadratic", "stiffness": 1.0},
    "interaction": {"family": "quadratic", "stiffness": 1.0}
  },
  "experiment": {"command": "check"}
})";

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& errs, const std::string& needle) {
  for (const auto& e : errs) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string with_experiment(const std::string& experiment) {
  std::string text = kMinimal;
  const auto pos = text.find(R"("experiment": {"command": "check"})");
  return text.replace(pos, std::string(R"("experiment": {"command": "check"})").size(), "\"experiment\": " + experiment);
}

}  // namespace

TEST(Config, MinimalConfigFillsDefaults) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.command, Command::Check);
  EXPECT_EQ(cfg.seed, 4u);
  ASSERT_TRUE(cfg.model);
  EXPECT_EQ(cfg.model->vertex_count(), 3u);
  EXPECT_EQ(cfg.model->t_max(), 2.0);
  EXPECT_EQ(cfg.h, 0.01);
  EXPECT_EQ(cfg.output_directory, "out");
  EXPECT_TRUE(cfg.echo["integrator"].contains("h"));
}

TEST(Config, EchoIsAFixpoint) {
  for (const std::string text :
       {std::string(kMinimal),
        with_experiment(R"({"command": "lyapunov-scan", "energy_grid": [25, 50, 100], "ensemble": 100})"),
        with_experiment(R"({"command": "decay-fit", "observable": "p2:a", "horizon": 5})"),
        with_experiment(R"({"command": "simulate", "initial": {"kind": "energy", "energy": 40}})")}) {
    const auto a = parse_config(text);
    const auto b = parse_config(a.echo.dump());
    EXPECT_EQ(a.echo, b.echo);
    EXPECT_EQ(config_hash(a), config_hash(b));
  }
}

TEST(Config, BundledConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(OSCNET_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
  }
}

TEST(Config, ThetaTimesTmaxMustBeBelowOne) {
  const auto errs = errors_of(with_experiment(R"({"command": "lyapunov-scan", "theta": 0.6, "energy_grid": [25, 50, 100]})"));
  EXPECT_TRUE(any_contains(errs, "theta*T_max must be < 1")) << ::testing::PrintToString(errs);
}

TEST(Config, UnknownVertexInEdge) {
  std::string text = kMinimal;
  text.replace(text.find(R"(["b", "c"])"), 10, R"(["b", "z"])");
  const auto errs = errors_of(text);
  EXPECT_TRUE(any_contains(errs, "references unknown vertex \"z\"")) << ::testing::PrintToString(errs);
  EXPECT_TRUE(any_contains(errs, "model.topology.edges[1]"));
}

TEST(Config, CollectsEveryError) {
  std::string text = with_experiment(R"({"command": "lyapunov-scan", "theta": 0.6, "energy_grid": [25, 50, 100], "colour": 1})");
  text.replace(text.find(R"("seed": 4)"), 9, R"("seed": -4)");
  const auto errs = errors_of(text);
  EXPECT_TRUE(any_contains(errs, "seed"));
  EXPECT_TRUE(any_contains(errs, "colour"));
  EXPECT_TRUE(any_contains(errs, "theta"));
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  const auto errs = errors_of("{\n  \"seed\": 1,\n  \"model\": ]\n}");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_NE(errs[0].find("line 3"), std::string::npos) << errs[0];
  EXPECT_NE(errs[0].find("column"), std::string::npos);
}

TEST(Config, UnknownCommandListsChoices) {
  const auto errs = errors_of(with_experiment(R"({"command": "explode"})"));
  EXPECT_TRUE(any_contains(errs, "lyapunov-scan"));
}

TEST(Config, CounterexampleTakesNoModel) {
  EXPECT_NO_THROW(parse_config(R"({"experiment": {"command": "counterexample-c4"}})"));
  EXPECT_FALSE(errors_of(with_experiment(R"({"command": "counterexample-c4"})")).empty());
}

TEST(Config, PotentialValidationIsPointed) {
  std::string text = kMinimal;
  text.replace(text.find(R"("pinning": {"family": "quadratic", "stiffness": 1.0})"),
               std::string(R"("pinning": {"family": "quadratic", "stiffness": 1.0})").size(),
               R"("pinning": {"family": "even_power", "degree": 3})");
  EXPECT_TRUE(any_contains(errors_of(text), "model.pinning"));
}

TEST(Config, GibbsTestNeedsSampleTemperatureWhenBathsDiffer) {
  const auto errs = errors_of(with_experiment(R"({"command": "equilibrium-test", "test": "gibbs"})"));
  EXPECT_TRUE(any_contains(errs, "sample_temperature"));
}

TEST(Config, MixedDegreesRequireExplicitTimescale) {
  std::string text = with_experiment(R"({"command": "lyapunov-scan", "energy_grid": [25, 50, 100]})");
  text.replace(text.find(R"("interaction": {"family": "quadratic", "stiffness": 1.0})"),
               std::string(R"("interaction": {"family": "quadratic", "stiffness": 1.0})").size(),
               R"("interaction": {"default": {"family": "soft_power", "degree": 4}, "per_edge": [{"edge": ["a", "b"], "potential": {"family": "soft_power", "degree": 2}}]})");
  EXPECT_TRUE(any_contains(errors_of(text), "li"));
}

TEST(Runner, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5e17}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}
