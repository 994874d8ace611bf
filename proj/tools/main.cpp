#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "kquant/error.hpp"

using namespace kquant::cli;

int main(int argc, char** argv) {
  CLI::App app{"kquant: transcendental quantization lab on the reduced Riemann sphere"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::uint64_t seed = 0;

  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("--config", config_path, "experiment config file")->required();
  run_cmd->add_option("--output", options.output_dir, "output directory (overrides the config)");
  run_cmd->add_option("--jobs", options.jobs, "parallel cases")->check(CLI::PositiveNumber);
  auto* seed_opt = run_cmd->add_option("--seed", seed, "seed for corpora and fuzz cases");
  run_cmd->add_flag("--strict", options.strict, "treat unstable slope fits as failures");

  auto* validate_cmd = app.add_subcommand("validate", "check a config without running numerics");
  validate_cmd->add_option("--config", config_path, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigInvalid;
  }

  try {
    ExperimentConfig config = ExperimentConfig::load(config_path);
    if (*validate_cmd) {
      validate(config);
      std::cout << "valid\n";
      return kOk;
    }
    if (*seed_opt) options.seed = seed;
    options.config_path = config_path;
    const RunSummary s = run(config, options);
    std::ifstream summary(s.output_dir + "/summary.txt");
    std::cout << summary.rdbuf();
    for (const auto& f : s.numerical_failures) std::cerr << "NumericalFailure: " << f << '\n';
    return s.exit_code;
  } catch (const ConfigInvalid& e) {
    std::cerr << "ConfigInvalid: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const kquant::Error& e) {
    std::cerr << "NumericalFailure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}
