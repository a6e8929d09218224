#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigjoin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `sigjoin` tool: subcommands gen, join, bench and cost.
/// `args` excludes the program name. Regular output goes to `out`,
/// diagnostics and stats lines to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sigjoin::cli
