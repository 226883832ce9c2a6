#pragma once

#include <iosfwd>

namespace diffdrive::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,           // bad flags or arguments
  kConfig = 2,          // scenario could not be read or failed validation
  kReferenceTooSlow = 3,  // tracking gain design singular
  kDiverged = 4,        // a simulation diverged
  kIo = 5,              // output could not be written
};

/// Runs the command line front end. Writes results to `out` and diagnostics
/// to `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace diffdrive::cli
