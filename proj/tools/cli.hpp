#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stochsep::cli {

enum ExitCode : int { ok = 0, usage = 1, invalid = 2, guard_rail = 3 };

/// Runs one command line (without the program name); the report goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stochsep::cli
