#pragma once

#include <string>
#include <vector>

namespace ipts::cli {

/// Entry point shared by the binary and the tests. Returns the exit code:
/// 0 success, 1 runtime error, 2 usage error. Errors are written to stderr
/// as {"error": {"module", "message", "context"}}.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace ipts::cli
