#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridsleuth {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kParse = 1;
inline constexpr int kInvariant = 2;
inline constexpr int kInfeasiblePlan = 3;
inline constexpr int kOracleInconsistent = 4;
inline constexpr int kCheckFailed = 5;
}  // namespace exit_code

/// Runs the command line (without the program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridsleuth
