#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace contract_forge::cli {

// Exit codes: 0 success / IC, 1 parse error, 2 invalid instance,
// 3 not implementable / IC violation.
inline constexpr int kOk = 0;
inline constexpr int kParseError = 1;
inline constexpr int kInvalidInstance = 2;
inline constexpr int kNegativeVerdict = 3;

// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contract_forge::cli
