#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ccpwf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// args excludes the program name. Summary lines go to `out`, errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccpwf::cli
