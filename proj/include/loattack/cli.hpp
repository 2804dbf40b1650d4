#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace loattack::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInvariantFailure = 1,
  kConfigError = 2,
  kIoError = 3,
};

// Runs the command line `args` (args[0] is the program name). Reports go to
// `out`, diagnostics to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace loattack::cli
