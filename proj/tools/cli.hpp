#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcagg::cli {

/// Exit codes: 0 success, 1 input/configuration error, 2 internal failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInternal = 2;

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless an --out path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcagg::cli
