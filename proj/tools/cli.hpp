#ifndef IFGF_TOOLS_CLI_HPP
#define IFGF_TOOLS_CLI_HPP

#include <iosfwd>

namespace ifgf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ifgf::cli

#endif  // IFGF_TOOLS_CLI_HPP
