#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fmb::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;
inline constexpr int kNumerical = 3;
inline constexpr int kMissingData = 4;

/// Runs the `fmb` command line. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmb::cli
