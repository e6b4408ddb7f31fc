#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace asode::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kSolverFailure = 2 };

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace asode::cli
