#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uimvdr::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // library error (bad data, I/O, ...)
inline constexpr int kExitUsage = 2;    // command-line validation failure

// Runs the tool with `args` (without the program name). Records go to `out`;
// warnings, verbose logging and the `error code=... message=...` line on
// failure go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uimvdr::cli
