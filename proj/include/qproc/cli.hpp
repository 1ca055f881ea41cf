// Command-line front end. Exit codes: 0 success, 2 usage or input error,
// 3 inconsistent data.
#pragma once

#include <ostream>

namespace qproc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconsistent = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qproc
