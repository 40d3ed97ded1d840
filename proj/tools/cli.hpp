#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace safeplan::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNegativeVerdict = 1,
  kUsageError = 2,
  kInternalError = 3,
};

/// Runs the command line `args` (without the program name) and returns the
/// process exit code. All output goes to `out` / `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace safeplan::cli
