#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace elg::cli {

// Runs the command-line tool with the given arguments (excluding the program
// name), writing to the supplied streams. Returns the process exit code:
//   0 success, 1 usage or input parse error, 2 computation failure
//   (non-convergence, degenerate data), 3 file I/O error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// argv-style convenience wrapper over std::cout / std::cerr.
int run(int argc, const char* const* argv);

}  // namespace elg::cli
