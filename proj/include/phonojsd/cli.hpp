#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phonojsd {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitComputation = 3,
};

/// Runs one invocation; `args` excludes the program name. Data goes to `out`
/// (or --out files), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace phonojsd
