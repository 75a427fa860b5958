#pragma once

#include <iosfwd>

namespace jumpback::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 2,
    kDataError = 3,
    kNumericError = 4,
};

/// Parses argv and runs one subcommand. Normal output goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jumpback::cli
