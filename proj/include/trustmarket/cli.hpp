#pragma once

#include <iosfwd>

namespace trustmarket {

// Entry point of the trustmarket command-line tool, callable in-process.
// Returns 0 on success, 2 on configuration errors, 3 on runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trustmarket
