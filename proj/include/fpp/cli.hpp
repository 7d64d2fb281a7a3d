#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpp {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of run_cli.
enum ExitCode : int { exit_pass = 0, exit_failure = 1, exit_usage = 2 };

/// Runs one subcommand (verify, estimate, construct, derivative, classify,
/// fourier). `args` excludes the program name. Reports go to `out` unless
/// --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpp
