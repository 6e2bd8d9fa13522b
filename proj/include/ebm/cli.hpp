#ifndef EBM_CLI_HPP
#define EBM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ebm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point for the `ebm` tool. `args` excludes the program name.
/// Subcommands: train, reconstruct, sample, eval, mosaic, info.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ebm::cli

#endif  // EBM_CLI_HPP
