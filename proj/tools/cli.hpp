#pragma once

#include <string>
#include <vector>

namespace cvghz::cli {

/// Exit codes: 0 success, 1 oracle-check failure, 2 bad flags, 3 physics
/// errors (zero success probability, no threshold crossing, truncation).
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace cvghz::cli
