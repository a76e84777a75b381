#pragma once

#include <ostream>

namespace lieplan::cli {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitUncontrollable = 2;  // also out-of-catalog
inline constexpr int kExitOutsideDomain = 3;
inline constexpr int kExitFuzzFailures = 4;

/// Runs the `lieplan` command line; returns the exit code. JSON goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lieplan::cli
