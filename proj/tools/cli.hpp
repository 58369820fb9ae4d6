#pragma once

#include <string>
#include <vector>

namespace windramp::cli {

/// Runs one CLI invocation (argv without the program name). Exit codes:
/// 0 success, 1 runtime/config error, 2 usage error.
int run_cli(const std::vector<std::string>& args);

} // namespace windramp::cli
