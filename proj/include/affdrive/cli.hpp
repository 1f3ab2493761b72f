#pragma once

// Command-line front end: run-episode, run-benchmark, tune-probe and
// config dump.

#include <iosfwd>
#include <string>
#include <vector>

namespace affdrive {

inline constexpr int kExitOk = 0;
inline constexpr int kExitEpisodeFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affdrive
