#pragma once

#include <string>
#include <vector>

namespace tsgdiff {

// Entry point shared by the tsgdiff binary and the in-process CLI tests.
// args excludes the program name. Returns the process exit code: 0 on
// success, 2 for a non-finite training loss, 1 for every other error.
int run_cli(const std::vector<std::string>& args);

}  // namespace tsgdiff
