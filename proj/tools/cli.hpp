#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pch::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` unless --output is given; errors are written to `err` as JSON.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pch::cli
