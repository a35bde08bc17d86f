#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xorcop::cli {

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`. Returns 0 on success, 1 on a library error and 2 on
/// a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xorcop::cli
