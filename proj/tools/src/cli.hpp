#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ampforge::cli {

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Returns the process exit status: 0 ok, 2 bad input, 3 no convergence,
/// 1 anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ampforge::cli
