#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evbranch::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kDomain = 2,
    kIo = 3,
    kValidation = 4,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evbranch::cli
