#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ivar {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Every option of every subcommand. Unset optionals take the command's
// default when the run starts; the resolved config is echoed as config.json.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  std::string domain;
  std::string kernel;
  std::string strategy = "ivar";
  int n = 0;
  int batch = 1;
  std::optional<double> nugget;
  int n_mc = 10000;
  int restarts = 3;
  std::optional<int> max_iterations;
  std::optional<double> gradient_tolerance;
  std::optional<double> objective_tolerance;
  int candidates = 0;  // 0: strategy default

  std::vector<int> sizes;
  std::vector<std::string> strategies;
  int draws = 100;
  int test_points = 2000;
  int grid = 2001;

  std::string function = "ishigami";
  int total = 60;
  bool extended = false;
  int hyper_restarts = 8;
  int error_samples = 10000;

  int nodes = 20;
  int terms = 20;
  double decay = 0.8;
  int max_index = 40;

  int configs = 20;
};

nlohmann::json to_json(const RunConfig& config);
// Overrides the fields named in `j`; unknown keys throw ConfigError.
void apply_json(RunConfig& config, const nlohmann::json& j);

int run_command(RunConfig config);
int run_cli(int argc, const char* const* argv);

}  // namespace ivar
