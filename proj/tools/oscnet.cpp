// oscnet: command-line front end.
//
//   oscnet <command> --config <path> [--seed N] [--out DIR] [--threads N]
//   oscnet fixtures
//
// Exit status: 0 ok, 1 validation failure, 2 numerical failure (blowup),
// 3 inconclusive statistical report.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "oscnet/config.hpp"
#include "oscnet/parallel.hpp"
#include "oscnet/runner.hpp"

namespace {

int list_fixtures() {
  for (const auto& name : oscnet::fixture_names()) {
    const auto topo = oscnet::builtin_fixture(name);
    const auto rep = oscnet::controls(topo);
    std::cout << name << "  vertices=" << topo.vertex_count() << " edges=" << topo.edges().size()
              << " baths=" << topo.baths().size() << " controlled=" << (rep.controlled ? "yes" : "no");
    if (rep.controlled) std::cout << " max_depth=" << rep.max_depth();
    std::cout << "\n    " << oscnet::fixture_description(name) << "\n";
  }
  const auto fx = oscnet::c4_counterexample();
  std::cout << "c4-counterexample (command counterexample-c4)\n    " << fx.description << "\n";
  return oscnet::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillator networks driven by Langevin heat baths"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned threads = oscnet::default_thread_count();

  auto* fixtures = app.add_subcommand("fixtures", "List built-in topologies and the C4 counterexample model");
  std::vector<CLI::App*> experiments;
  for (const auto& name : oscnet::command_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    sub->add_option("--seed", seed, "Override the configured seed");
    sub->add_option("--out", out_dir, "Override the output directory");
    sub->add_option("--threads", threads, "Worker threads (default: OSCNET_THREADS or 1)")
        ->check(CLI::Range(1u, 1024u));
    experiments.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? oscnet::kExitOk : oscnet::kExitValidation;
  }

  if (fixtures->parsed()) return list_fixtures();

  for (auto* sub : experiments) {
    if (!sub->parsed()) continue;
    try {
      oscnet::ExperimentConfig cfg = oscnet::load_config(config_path);
      if (oscnet::to_string(cfg.command) != sub->get_name()) {
        std::cerr << "error: config requests '" << oscnet::to_string(cfg.command) << "' but the command line says '"
                  << sub->get_name() << "'\n";
        return oscnet::kExitValidation;
      }
      oscnet::RunOptions options;
      if (sub->count("--seed")) options.seed = seed;
      if (sub->count("--out")) options.output_directory = out_dir;
      options.threads = threads;
      const auto result = oscnet::run(std::move(cfg), options);
      if (result.exit_status == oscnet::kExitValidation) {
        std::cerr << "error: " << result.message << "\n";
      } else {
        std::cout << result.message << " (exit " << result.exit_status << "), outputs in " << result.directory.string()
                  << "\n";
      }
      return result.exit_status;
    } catch (const oscnet::ConfigError& e) {
      std::cerr << e.what() << "\n";
      return oscnet::kExitValidation;
    }
  }
  return oscnet::kExitValidation;
}
