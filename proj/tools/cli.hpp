#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pendag::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kNotConverged = 3 };

// Entry point of the `pendag` tool. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pendag::cli
