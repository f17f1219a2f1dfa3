#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfo {

/// Runs the `cfo` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on data or computation errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfo
