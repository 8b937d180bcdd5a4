#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riccati_spectra {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitPass = 0,
  kExitInputError = 1,
  kExitVerificationFailure = 2,
  kExitSimulationFailure = 3,
};

/// Runs the tool with args[0] as the program name. Reports go to `out` (or
/// the --output file), diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riccati_spectra
