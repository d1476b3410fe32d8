#ifndef TAXALIGN_TOOLS_CLI_HPP_
#define TAXALIGN_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace taxalign::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconsistent = 2;
inline constexpr int kExitBudget = 3;

// Runs one command line (without the program name). Reads interactive input
// from `in`; writes results to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace taxalign::cli

#endif  // TAXALIGN_TOOLS_CLI_HPP_
