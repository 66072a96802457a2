#pragma once

#include <iosfwd>

namespace qimp::cli {

// Exit codes.
inline constexpr int kAllTrue = 0;
inline constexpr int kSomeFalse = 1;
inline constexpr int kIndeterminate = 2;
inline constexpr int kUsage = 64;
inline constexpr int kDataError = 65;
inline constexpr int kNoInput = 66;

/// Runs the `qimp` command line; returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qimp::cli
