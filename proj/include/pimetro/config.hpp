#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pimetro/histogram.hpp"
#include "pimetro/measurement.hpp"

namespace pimetro {

/// Everything that determines simulation output apart from the seed.
struct SimulationConfig {
  TrialConfig trial;
  StoppingCriteria stopping;
  std::int64_t max_measurements = kDefaultMaxMeasurements;

  void validate() const;

  bool operator==(const SimulationConfig&) const = default;
};

/// Bad key, bad value, or a violated invariant. `key` names the culprit.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ConfigKey {
  std::string name;
  std::string description;
  std::function<std::string(const SimulationConfig&)> get;
  /// Throws ConfigError on a malformed value.
  std::function<void(SimulationConfig&, std::string_view)> set;
};

/// Every config key in canonical order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key by name. Unknown keys throw ConfigError.
void set_config_value(SimulationConfig& cfg, std::string_view key, std::string_view value);

/// Parses the flat `key = value` format: one pair per line, `#` starts a
/// comment, blank lines ignored, duplicate and unknown keys rejected.
/// Returns the keys in the order they were given.
std::vector<std::pair<std::string, std::string>> parse_config_pairs(std::string_view text);

/// Applies parsed pairs on top of `base` and validates the result.
SimulationConfig apply_config_text(SimulationConfig base, std::string_view text);

/// Canonical serialization, one `key = value` line per key.
std::string to_config_text(const SimulationConfig& cfg);

/// Ordered key -> value map (the canonical text as data).
std::vector<std::pair<std::string, std::string>> config_entries(const SimulationConfig& cfg);

/// Hex FNV-1a 64 of the canonical text.
std::string config_digest(const SimulationConfig& cfg);

std::string fnv1a_hex(std::string_view bytes);

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);

}  // namespace pimetro
