#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace actlex {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one command line (without the program name). Exit codes: 0 success,
// 1 usage error, 2 data error.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace actlex
