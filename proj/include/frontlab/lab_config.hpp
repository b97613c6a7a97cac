#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace frontlab {

/// A config value: number, string or list of numbers.
using ConfigValue = std::variant<double, std::string, std::vector<double>>;

/// One experiment run. Files look like
///
///   name = "exp_spreading"
///   f = cubic(0.3)
///   seed = 1
///   out_dir = "out/spreading"
///   profile = "smoke"
///
///   [exp_spreading]
///   h = 0.5
///   t_end = 150
///   R = 12
///
/// Top-level keys are fixed; the single table carries the grid, the numerics
/// and the experiment parameters, and its name must match `name`.
struct ExperimentConfig {
  std::string name;
  std::string f;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string profile = "smoke";  // smoke | full
  std::map<std::string, ConfigValue> params;

  bool has(const std::string& key) const { return params.count(key) > 0; }
  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;  // ConfigError when absent
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the TOML subset above. Unknown keys, a missing `f`, malformed lines
/// and out-of-range parameters are ConfigErrors carrying the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Inverse of parse_config; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Checks names, keys and parameter ranges. parse_config already calls it;
/// use it for configs built in code. `lines` maps keys to source lines.
void validate_config(const ExperimentConfig& cfg, const std::map<std::string, int>& lines = {});

/// Names accepted in `name`.
std::vector<std::string> experiment_names();

/// Keys the table of experiment `name` accepts.
std::vector<std::string> experiment_keys(const std::string& name);

}  // namespace frontlab
