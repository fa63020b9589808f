#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obl {

/// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitUsage = 2,
  kExitFormat = 3,
  kExitDomain = 4,
  kExitTraining = 5,
  kExitUnsupported = 6,
};

/// Runs one invocation, e.g. {"sample", "--fn", "square", "--out", "d.csv"}.
/// Diagnostics go to `err`; the return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace obl
