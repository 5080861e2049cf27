#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spca {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitSolver = 3;

// Runs one `spca` invocation; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spca
