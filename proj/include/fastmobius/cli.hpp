#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fastmobius::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kCapacity = 3, kData = 4 };

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless --out redirects them; diagnostics and timings go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "%.9f" with negative zero printed as zero.
std::string format_value(double v);

}  // namespace fastmobius::cli
