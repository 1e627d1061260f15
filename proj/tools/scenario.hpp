#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frontforge/grid.hpp"
#include "frontforge/measure.hpp"
#include "frontforge/nonlinearity.hpp"

namespace frontforge::cli {

enum class Task { Solve, Continue, Bounds, Evolve, Classify, Validate };

std::string to_string(Task task);

enum ExitCode : int { kOk = 0, kConfigError = 1, kNoConvergence = 2, kValidationFailed = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Task options; keys absent from the config keep these defaults.
struct ScenarioOptions {
  // Newton
  std::optional<double> phase_level;
  double tol = 1e-10;
  int max_iter = 50;
  double epsilon = 0.0;
  std::optional<double> width;
  // continuation
  double eps0 = 0.5;
  double factor = 0.5;
  std::optional<double> floor;
  // monostable ladder
  std::vector<int> ladder{4, 8, 16, 32};
  // diagnostics and bounds
  bool chen = true;
  std::optional<double> lower_bound_radius;
  double audit_t_max = 10.0;
  double audit_dt = 0.5;
  // evolution
  std::string initial = "heaviside";
  std::optional<double> x0;
  double horizon = 10.0;
  std::optional<double> dt;
  double level = 0.5;
  int samples = 200;
  int snapshot_every = 0;
  std::optional<double> window;
  bool stop_at_window = false;
  double burn_in = 0.3;
};

// Fully validated scenario: every block has gone through its constructor.
struct Scenario {
  std::string text;  // raw config bytes, hashed into the manifest
  nlohmann::json config;
  Measure measure;
  Nonlinearity nonlinearity;
  Grid grid;
  Task task;
  ScenarioOptions options;
  std::filesystem::path output;
};

// Throws ConfigError on malformed JSON, unknown keys or invalid parameters.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::filesystem::path> output;  // overrides the config's output entry
  bool dump_jacobian = false;
};

struct RunResult {
  int exit_code = kOk;
  std::string message;
  std::filesystem::path directory;
  std::map<std::string, std::string> artifacts;  // file name -> contents
};

// Computes every artifact in memory, then writes them with a manifest. Nothing is
// written when the scenario fails before producing results.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

std::string sha256_hex(const std::string& bytes);

}  // namespace frontforge::cli
