#pragma once

#include <iostream>

namespace sparsefw {

// Entry point of the sparsefw tool, exposed so tests can drive it in
// process. Returns the process exit code: 0 on success, 1 for configuration
// or usage errors, 2 when a solver fails numerically.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace sparsefw
