#pragma once

#include <string>
#include <vector>

namespace nlqs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

// args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace nlqs::cli
