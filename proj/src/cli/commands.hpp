#pragma once

#include <iosfwd>

#include "config.hpp"

namespace trustmarket::cli {

struct RunOptions {
  int jobs = 1;
};

// Each command reads its blocks from `root`, writes artifacts, prints its
// report on `out` and returns the process exit code.
int cmd_equilibrium(Node& root, const RunOptions& opt, std::ostream& out);
int cmd_sweep(Node& root, const RunOptions& opt, std::ostream& out);
int cmd_optimize(Node& root, const RunOptions& opt, std::ostream& out);
int cmd_integrate(Node& root, const RunOptions& opt, std::ostream& out);
int cmd_simulate(Node& root, const RunOptions& opt, std::ostream& out);

}  // namespace trustmarket::cli
