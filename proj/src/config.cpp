#include "pimetro/config.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace pimetro {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(key), "expected a real number, got '" + std::string(text) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError(std::string(key), "expected true/false, got '" + std::string(text) + "'");
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

template <typename Field>
ConfigKey real_key(std::string name, std::string description, Field field) {
  return ConfigKey{
      name, std::move(description),
      [field](const SimulationConfig& c) { return format_real(field(c)); },
      [field, name](SimulationConfig& c, std::string_view v) { field(c) = parse_real(name, v); }};
}

template <typename Field>
ConfigKey bool_key(std::string name, std::string description, Field field) {
  return ConfigKey{
      name, std::move(description),
      [field](const SimulationConfig& c) { return format_bool(field(c)); },
      [field, name](SimulationConfig& c, std::string_view v) { field(c) = parse_bool(name, v); }};
}

template <typename Field>
ConfigKey int_key(std::string name, std::string description, Field field) {
  return ConfigKey{
      name, std::move(description),
      [field](const SimulationConfig& c) {
        return std::to_string(field(c));
      },
      [field, name](SimulationConfig& c, std::string_view v) {
        using T = std::remove_cvref_t<decltype(field(c))>;
        const std::int64_t parsed = parse_int(name, v);
        if (parsed < std::numeric_limits<T>::min() || parsed > std::numeric_limits<T>::max()) {
          throw ConfigError(name, "value out of range");
        }
        field(c) = static_cast<T>(parsed);
      }};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> keys;
  keys.push_back(real_key("radius", "circle radius (mm)",
                          [](auto& c) -> auto& { return c.trial.radius; }));
  keys.push_back(ConfigKey{
      "rounding_rule", "second-iteration rounding: nearest | literal",
      [](const SimulationConfig& c) { return std::string(to_string(c.trial.rounding)); },
      [](SimulationConfig& c, std::string_view v) {
        try {
          c.trial.rounding = rounding_rule_from_string(std::string(trim(v)));
        } catch (const std::invalid_argument& e) {
          throw ConfigError("rounding_rule", e.what());
        }
      }});
  keys.push_back(real_key("wire_diameter", "wire diameter (mm)",
                          [](auto& c) -> auto& { return c.trial.errors.wire_diameter; }));
  keys.push_back(real_key("bend_elongation_per_mm", "bend elongation per mm of wire diameter",
                          [](auto& c) -> auto& {
                            return c.trial.errors.bend_elongation_per_mm;
                          }));
  keys.push_back(real_key("cut_elongation", "bevel protrusion per cut (mm)",
                          [](auto& c) -> auto& { return c.trial.errors.cut_elongation; }));
  keys.push_back(real_key("cut_shortening_short_side", "bevel recession per cut (mm, not simulated)",
                          [](auto& c) -> auto& {
                            return c.trial.errors.cut_shortening_short_side;
                          }));
  keys.push_back(real_key("cut_match_stdev", "stdev of cutting one wire to match another (mm)",
                          [](auto& c) -> auto& { return c.trial.errors.cut_match_stdev; }));
  keys.push_back(real_key("juxtaposition_span", "width of the uniform juxtaposition error (mm)",
                          [](auto& c) -> auto& {
                            return c.trial.errors.juxtaposition_span;
                          }));
  keys.push_back(real_key("circumference_stdev_base", "intercept of the circumference stdev (mm)",
                          [](auto& c) -> auto& {
                            return c.trial.errors.circumference_stdev_base;
                          }));
  keys.push_back(real_key("circumference_stdev_slope", "slope of the circumference stdev (mm/mm)",
                          [](auto& c) -> auto& {
                            return c.trial.errors.circumference_stdev_slope;
                          }));
  keys.push_back(ConfigKey{
      "circumference_stdev_override", "stdev used at radius 450 instead of the fit, or none",
      [](const SimulationConfig& c) {
        const auto& o = c.trial.errors.circumference_stdev_override;
        return o ? format_real(*o) : std::string("none");
      },
      [](SimulationConfig& c, std::string_view v) {
        if (trim(v) == "none") {
          c.trial.errors.circumference_stdev_override.reset();
        } else {
          c.trial.errors.circumference_stdev_override = parse_real("circumference_stdev_override", v);
        }
      }});
  keys.push_back(bool_key("fixed_errors_enabled", "apply bend and cut elongation",
                          [](auto& c) -> auto& {
                            return c.trial.errors.fixed_errors_enabled;
                          }));
  keys.push_back(bool_key("random_errors_enabled", "apply all random error draws",
                          [](auto& c) -> auto& {
                            return c.trial.errors.random_errors_enabled;
                          }));
  keys.push_back(real_key("cross_section_distortion", "discounted source, must be 0",
                          [](auto& c) -> auto& {
                            return c.trial.errors.cross_section_distortion;
                          }));
  keys.push_back(real_key("groove_systematic_error", "discounted source, must be 0",
                          [](auto& c) -> auto& {
                            return c.trial.errors.groove_systematic_error;
                          }));
  keys.push_back(real_key("six_r_marking_error", "discounted source, must be 0",
                          [](auto& c) -> auto& {
                            return c.trial.errors.six_r_marking_error;
                          }));
  keys.push_back(int_key("min_peak_count", "stopping rule: minimum peak count",
                         [](auto& c) -> auto& { return c.stopping.min_peak_count; }));
  keys.push_back(real_key("peak_dominance", "stopping rule: peak / neighbour factor",
                          [](auto& c) -> auto& { return c.stopping.peak_dominance; }));
  keys.push_back(int_key("min_consecutive_bins", "stopping rule: minimum run of bins above threshold",
                         [](auto& c) -> auto& { return c.stopping.min_consecutive_bins; }));
  keys.push_back(real_key("threshold_fraction", "stopping rule: run threshold as a fraction of the peak",
                          [](auto& c) -> auto& { return c.stopping.threshold_fraction; }));
  keys.push_back(int_key("max_measurements", "campaign measurement cap",
                         [](auto& c) -> auto& { return c.max_measurements; }));
  return keys;
}

}  // namespace

void SimulationConfig::validate() const {
  try {
    trial.validate();
    stopping.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  if (max_measurements < 1) throw ConfigError("max_measurements", "must be >= 1");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(SimulationConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown config key");
}

std::vector<std::pair<std::string, std::string>> parse_config_pairs(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    bool known = false;
    for (const auto& k : config_keys()) known = known || k.name == key;
    if (!known) throw ConfigError(key, "unknown config key (line " + std::to_string(line_no) + ")");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate config key");
    pairs.emplace_back(std::move(key), std::move(value));
  }
  return pairs;
}

SimulationConfig apply_config_text(SimulationConfig base, std::string_view text) {
  for (const auto& [key, value] : parse_config_pairs(text)) set_config_value(base, key, value);
  base.validate();
  return base;
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimulationConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : config_keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::string to_config_text(const SimulationConfig& cfg) {
  std::string text;
  for (const auto& [key, value] : config_entries(cfg)) {
    text += key;
    text += " = ";
    text += value;
    text += '\n';
  }
  return text;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string config_digest(const SimulationConfig& cfg) { return fnv1a_hex(to_config_text(cfg)); }

std::string format_real(double value) { return fmt::format("{}", value); }

}  // namespace pimetro
