#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oscnet/conditions.hpp"
#include "oscnet/diagnostics.hpp"
#include "oscnet/errors.hpp"
#include "oscnet/model.hpp"

namespace oscnet {

enum class Command { Check, Simulate, EquilibriumTest, LyapunovScan, DissipationScan, DecayFit, CounterexampleC4 };

std::string to_string(Command c);
std::optional<Command> parse_command(std::string_view name);
std::vector<std::string> command_names();

/// How an experiment picks its starting point.
struct InitialSpec {
  enum class Kind { Zero, Energy, Explicit };
  Kind kind = Kind::Zero;
  double energy = 0.0;
  Placement placement = Placement::Interaction;
  std::vector<double> p, q;  // vertex-major, Explicit only
};

State build_initial(const Model& model, const InitialSpec& spec);

struct CheckParams {
  ConditionOptions options;
};

struct SimulateParams {
  double t_end = 10.0;
  InitialSpec initial;
};

struct EquilibriumParams {
  enum class Test { Moments, Gibbs };
  Test test = Test::Moments;
  // moments
  double burn_in = 100.0;
  std::size_t samples = 100000;
  MomentOptions moments;
  // gibbs
  std::vector<std::string> observables;
  double t_check = 10.0;
  std::optional<double> sample_temperature;
};

struct DissipationParams {
  double epsilon = 1e-3;
  std::size_t ensemble = 1000;
  std::vector<double> energy_grid;
  TimescaleRule rule;
  Placement placement = Placement::Interaction;
};

struct DecayParams {
  std::string observable;
  double horizon = 20.0;
  std::size_t ensemble = 1000;
  InitialSpec initial;
  DecayOptions options;
};

struct CounterexampleParams {
  double t_end = 0.6;
  double h = 1e-4;
};

/// A fully validated configuration. `echo` is the normalised document with
/// every default filled in; parsing echo.dump() yields the same echo.
struct ExperimentConfig {
  nlohmann::json echo;
  Command command = Command::Check;
  std::uint64_t seed = 0;
  std::optional<Model> model;  // absent for counterexample-c4

  double h = 0.01;
  bool energy_adaptive = true;

  std::string output_directory = "out";
  std::size_t record_every = 1;
  bool keep_states = false;

  CheckParams check;
  SimulateParams simulate;
  EquilibriumParams equilibrium;
  DriftConfig drift;
  DissipationParams dissipation;
  DecayParams decay;
  CounterexampleParams counterexample;
};

/// Carries every problem found, each prefixed by its config path.
class ConfigError : public ArgumentError {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// 64-bit FNV-1a of the canonical echo.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace oscnet
