#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mapgeom::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kInputError = 2;

// Runs the command line `args` (without the program name). Human-readable
// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mapgeom::cli
