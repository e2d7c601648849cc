#pragma once

// Experiment runner behind the semigroup_cli tool. Each subcommand runs a
// fixed set of named checks, writes <out>/<subcommand>.json and, where
// applicable, CSV traces, and maps the outcome to an exit code.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semigroup/models.hpp"

namespace semigroup::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct ExperimentConfig {
  std::size_t n = 64;
  double p = 2.0;
  double k1 = -1.0;
  double k2 = -1.0;
  LambdaProfile lambda = LambdaProfile::sinusoid(2.0, 1.0);
  double dt = 0.01;
  double t_end = 1.0;
  std::uint64_t seed = 20240611;
  std::size_t samples = 500;
  std::string scheme = "implicit-euler";  // implicit-euler | crank-nicolson | expm
  std::string x0 = "random";              // random | cos
  std::size_t snapshots = 0;
  double expm_bound = Tolerances{}.expm_norm_bound;  // Overflow above ||tA||_1
  std::filesystem::path out_dir = "semigroup_out";
  std::map<std::string, double> thresholds;  // per-check tolerance, see check_registry()

  double threshold(const std::string& check) const;
  Tolerances tolerances() const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& subcommands();

struct CheckInfo {
  std::string subcommand;
  double tolerance;  // default threshold, overridable as tol.<name>
  std::string description;
};

/// Every check, keyed by name. Each one is produced by exactly one subcommand.
const std::map<std::string, CheckInfo>& check_registry();

/// "key = value" lines (# comments, blank lines) or a JSON object.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

/// Subcommand defaults, then each layer of key/values in order. Keys are
/// case-insensitive and '-' equals '_'. Validates ranges; ConfigError on
/// unknown keys or bad values.
ExperimentConfig make_config(std::string_view subcommand, const std::vector<KeyValues>& layers);

struct RunOutcome {
  int exit_code = kExitPass;
  nlohmann::json summary;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs one subcommand. Writes artifacts only when write_files is set.
RunOutcome run(std::string_view subcommand, const ExperimentConfig& config,
               bool write_files = true);

/// Runs configs concurrently, each into <out_dir>/sweep_<i>. The exit code is
/// 2 if any config is invalid, else 1 if any check fails, else 0.
int run_sweep(std::string_view subcommand, const std::vector<KeyValues>& base_layers,
              const nlohmann::json& sweep, const std::filesystem::path& out_dir,
              std::vector<RunOutcome>* outcomes = nullptr);

}  // namespace semigroup::cli
