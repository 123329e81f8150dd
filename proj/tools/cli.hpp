#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crlab::cli {

// Runs one CLI invocation (args excludes the program name) writing the human
// report to out and diagnostics to err. Exit codes: 0 success, 1 usage,
// 2 numerical failure, 3 invariant violation.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crlab::cli
