#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace probshap::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kIoError = 3,
  kNumericError = 4,
};

// Runs the command line `args` (args[0] is the program name) and returns the
// exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses a `key = value` document; '#' starts a comment. Keys are
// normalized to lower case with '_' replaced by '-'.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

}  // namespace probshap::cli
