#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gibbslik::cli {

inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kNumericalError = 3;
inline constexpr int kResourceGuard = 4;

// Runs one subcommand. args excludes the program name and is in the usual
// command-line order. Returns the process exit code; all human-readable
// diagnostics go to err, results to files or out.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gibbslik::cli
