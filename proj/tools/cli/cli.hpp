#pragma once

#include <iosfwd>

namespace momentest::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kInputError = 2;
inline constexpr int kNoEstimate = 3;
inline constexpr int kVerificationFailed = 4;

/// Runs the command line; output goes to `out` unless --output names a file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace momentest::cli
