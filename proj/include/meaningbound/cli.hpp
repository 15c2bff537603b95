#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace meaningbound {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitInternal = 3,
};

/// Entry point of the `meaningbound` tool; `args` excludes the program name.
/// Data goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace meaningbound
