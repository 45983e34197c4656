#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fspde/config.hpp"

namespace fspde {

struct CliOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int threads = 1;
};

// Exit codes shared by all subcommands:
//   0 all checks passed, 1 a verification verdict failed,
//   2 configuration/validation error, 3 numerical error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

int cmd_constants(const RunConfig& cfg, const CliOptions& opts);
int cmd_kernel(const RunConfig& cfg, const CliOptions& opts);
int cmd_simulate(const RunConfig& cfg, const CliOptions& opts);
int cmd_verify(const RunConfig& cfg, const CliOptions& opts, const std::string& which);

// Maps exceptions from a subcommand body onto the exit-code contract.
int run_guarded(const std::function<int()>& body);

}  // namespace fspde
