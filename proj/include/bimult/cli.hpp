#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bimult::cli {

enum ExitCode { kOk = 0, kValidationError = 1, kThresholdFailed = 2 };

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace bimult::cli
