#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "adiabatic/cli/run_config.hpp"

namespace adiabatic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitStructural = 1;
inline constexpr int kExitPropertyFailure = 2;

/// Runs the configured command, writes outputs under cfg.out_dir and logs
/// "[diag] key=value" lines to `log`. Returns the exit code.
int execute(const RunConfig& cfg, std::ostream& log);

/// Full command line: flags, ADIABATIC_* environment overrides, config file.
/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

}  // namespace adiabatic::cli
