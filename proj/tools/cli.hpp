#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ratdyn {

// Runs the command line `args` (without the program name). Returns the exit
// code: 0 on success, 1 when a check or witness fails, 2 on a parse or
// validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ratdyn
