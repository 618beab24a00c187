#pragma once

#include <ostream>

namespace indef {

enum ExitCode : int {
  kExitOk = 0,
  kExitSuiteFailure = 1,
  kExitHypothesis = 2,
  kExitUsage = 64,
};

/// Entry point of the `indef` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace indef
