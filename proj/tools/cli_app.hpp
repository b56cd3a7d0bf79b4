#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hlppl::cli {

/// Process exit codes.
enum ExitCode : int { kSuccess = 0, kIoError = 2, kValidationError = 3, kNumericalError = 4 };

/// Entry point behind the `hlppl` executable; returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hlppl::cli
