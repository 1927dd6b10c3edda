#pragma once

#include <string>
#include <vector>

namespace phmor {

// Command-line entry point; args excludes the program name. Returns the
// process exit code: 0 success, 1 config error, 2 numerical failure, 3 I/O
// error.
int run_cli(const std::vector<std::string>& args);

}  // namespace phmor
