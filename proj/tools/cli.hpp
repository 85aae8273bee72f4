#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memfuse::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kMalformedInput = 3,
    kNoConvergence = 4,
    kFitFailed = 5,
};

/// Runs one command line (args[0] is the program name). Errors are reported
/// as a single JSON line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memfuse::cli
