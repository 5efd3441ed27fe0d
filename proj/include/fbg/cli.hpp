#pragma once

// Command-line front end. Exit codes: 0 success, 2 usage, 3 invalid input,
// 4 numerical failure. Failures print one line `error: <kind>: <message>`.

#include <iosfwd>

namespace fbg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbg
