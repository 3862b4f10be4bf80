#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kauri {

/// Entry point of the `kauri` binary. `args` excludes the program name.
/// Returns 0 on success, 2 on flag errors and 1 on runtime errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kauri
