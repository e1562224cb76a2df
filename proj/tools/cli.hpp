#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lemll::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;
inline constexpr int kSolverError = 3;

// Runs `lemll <subcommand> ...`. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lemll::cli
