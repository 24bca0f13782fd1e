#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tsgaudit::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success, 1 I/O or validation failure, 2 usage error.
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsgaudit::cli
