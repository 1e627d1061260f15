#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "scenario.hpp"

int main(int argc, char** argv) {
  using namespace frontforge::cli;

  CLI::App app{"Traveling fronts for nonlocal reaction-diffusion equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool dump_jacobian = false;
  CLI::App* run = app.add_subcommand("run", "Run a scenario described by a JSON config");
  run->add_option("config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_flag("--dump-jacobian", dump_jacobian, "Write the operator matrix as jacobian.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    const Scenario scenario = load_scenario(config_path);
    RunOptions options;
    if (!out_dir.empty()) options.output = out_dir;
    options.dump_jacobian = dump_jacobian;
    const RunResult result = run_scenario(scenario, options);
    if (result.exit_code != kOk) std::fprintf(stderr, "frontforge: %s\n", result.message.c_str());
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "frontforge: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "frontforge: %s\n", e.what());
    return kConfigError;
  }
}
