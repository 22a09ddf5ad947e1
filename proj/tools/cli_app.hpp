#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pimetro/config.hpp"

namespace pimetro::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "PIMETRO_OUT_DIR";

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kCostCapExceeded = 3,
};

/// Defaults, then the config file, then command-line key flags (in order).
SimulationConfig resolve_config(const std::optional<std::string>& config_text,
                                const std::vector<std::pair<std::string, std::string>>& flags);

/// Runs the command line; everything a user sees goes to out/err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pimetro::cli
