#pragma once

#include <ostream>

namespace simplexflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Command-line entry point. Results go to --out (or `out` when absent),
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simplexflow
