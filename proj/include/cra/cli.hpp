#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cra {

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain = 2;
inline constexpr int exit_numerical = 3;

// Runs one command line (without the program name). Output goes to `out`
// unless --out is given; error records go to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cra
