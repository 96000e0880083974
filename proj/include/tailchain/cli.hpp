#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailchain {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_data_error = 1, exit_usage_error = 2 };

/// Runs one CLI invocation. `args` excludes the program name. JSON reports
/// go to `out` unless --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailchain
