#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace agentslice {

/// Exit codes of the `agentslice` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitPipeline = 3,
  kExitSchema = 4,
  kExitCassette = 5,
};

/// Runs the tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agentslice
