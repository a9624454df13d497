#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "monotune/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bayesian hyperparameter tuning with monotone-trend sign observations"};
  app.require_subcommand(1);

  std::string tune_config;
  auto* tune = app.add_subcommand("tune", "run one experiment and write trials.jsonl and summary.json");
  tune->add_option("--config", tune_config, "experiment config (JSON)")->required();

  std::string config_a, config_b;
  int repeats = 1;
  auto* compare = app.add_subcommand("compare", "paired HyperTune vs EI runs, writes comparison.csv");
  compare->add_option("--config-a", config_a, "first config")->required();
  compare->add_option("--config-b", config_b, "second config")->required();
  compare->add_option("--repeats", repeats, "number of paired seeds")->required();

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "check a config and print the search space");
  validate->add_option("--config", validate_config, "experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : monotune::kExitConfig;
  }

  if (*tune) return monotune::cmd_tune(tune_config, std::cout, std::cerr);
  if (*compare) return monotune::cmd_compare(config_a, config_b, repeats, std::cout, std::cerr);
  return monotune::cmd_validate(validate_config, std::cout, std::cerr);
}
