#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gainprint::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 2,
    kExitPartialDecode = 3,
    kExitUsage = 64,
};

/// Runs one `gainprint` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gainprint::cli
