#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace firecast {

/// Process exit codes of the command-line driver.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

/// Runs one subcommand; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace firecast
