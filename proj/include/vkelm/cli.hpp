#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vkelm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the command line tool. args excludes the program name.
/// Commands: gen-data, train, predict, evaluate, sweep, compare.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vkelm
