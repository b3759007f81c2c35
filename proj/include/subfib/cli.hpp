#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subfib {

/// Runs one command line (without the program name). Returns the exit status:
/// 0 success, 1 check failures, 2 usage or parse errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subfib
