#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tlf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

/// Runs the tlf command line on `args` (without the program name). Tables
/// go to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlf::cli
