#pragma once

#include <iosfwd>

namespace netequil {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitEmpty = 3,
  kExitImbalance = 4,
  kExitDisconnected = 5,
};

/// Runs one `netequil` invocation. Results and the stats/report lines go to
/// `out`, diagnostics and logs to `err`. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netequil
