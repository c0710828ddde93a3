#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covsel::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // check failures, solver/numeric errors
inline constexpr int kBadInput = 2;
inline constexpr int kMaxIter = 3;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace covsel::cli
