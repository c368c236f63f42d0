#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace svsp {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitClean = 0,
  kExitErrors = 1,     // ERROR diagnostics, or scenario exceptions nobody expected
  kExitUsage = 2,      // usage, parse or file error
  kExitAssertions = 3  // scenario assertion failures only
};

/// Runs one command line. `args` excludes the program name. Payload goes to
/// `out`; usage text, parse errors and logs go to `err`. `in` feeds repl.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace svsp
