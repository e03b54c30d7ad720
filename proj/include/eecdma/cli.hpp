#ifndef EECDMA_CLI_HPP
#define EECDMA_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "eecdma/montecarlo.hpp"

namespace eecdma {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 ok, 2 config/usage error, 3 non-convergence (solve),
// 4 unwritable output path (sweep).
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConverged = 3;
inline constexpr int kExitOutput = 4;

/// Resolved invocation, echoed verbatim into output headers.
struct RunManifest {
    SystemConfig config;
    std::string subcommand;
    std::string out_path;
    int trials = 0;
    int workers = 0;
    std::vector<GameKind> kinds;
    std::vector<int> user_counts;
    std::uint64_t trial = 0;
};

/// Parse a flat key=value config file into `config`. Unknown keys or
/// malformed values are errors (message returned, empty on success).
std::string apply_config_file(const std::string& path, SystemConfig& config);

int cmd_targets(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_solve(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunManifest& manifest, std::ostream& err);

void write_sweep_csv(std::ostream& out, const SweepSummary& summary, const RunManifest& manifest);

/// Full command-line entry point (subcommands targets | solve | sweep).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eecdma

#endif  // EECDMA_CLI_HPP
