#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace taskxfer::cli {

enum ExitCode : int { kSuccess = 0, kDataError = 1, kUsageError = 2 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taskxfer::cli
