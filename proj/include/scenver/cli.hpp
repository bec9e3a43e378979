#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scenver/config.hpp"

namespace scenver {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitCertified = 0, kExitError = 1, kExitCounterexample = 2 };

struct VerifyOptions {
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 0;
    bool validate = false;
    std::size_t campaign_runs = 0;
    std::optional<std::size_t> hist_dim;
    std::optional<std::string> output_directory;
};

/// Sampling → scenario program → certificate. Writes certificate.json and
/// transitions.csv, plus validation.json / min_barrier.csv, campaign.json and
/// hist_<dim>.csv when requested. Returns 0 on a probabilistic certificate and 2 on a
/// counterexample; errors propagate as exceptions.
int cmd_verify(RunConfig cfg, const VerifyOptions& opts, std::ostream& out);

/// Writes hist_<dim>.csv for the transition set described by the config.
void cmd_hist(RunConfig cfg, std::size_t dim, std::size_t bins, std::optional<std::uint64_t> seed, std::size_t jobs,
              const std::optional<std::string>& output_directory, std::ostream& out);

/// Full command-line entry point. Never throws; every failure maps to exit code 1.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scenver
