#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pam::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs `pam <args...>` (args excludes the program name). Returns the exit
// code; diagnostics go to `err`, JSON printed without an output path goes
// to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pam::cli
