#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flametomo::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,  // a self-check ran but missed its tolerance
    kUsage = 2,
    kIo = 3,
    kValidation = 4,  // bad values, configs or corrupt files
    kDivergence = 5,
    kInternal = 70,
};

// Environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "FLAMETOMO_WORKERS";

// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flametomo::cli
