#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace hopnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitViolation = 4;

enum class TrajectoryFormat { csv, json };

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    std::size_t workers = 1;
    TrajectoryFormat format = TrajectoryFormat::csv;
    // Set by the per-operation subcommands: run only this operation, with
    // its parameters from the scenario when listed there.
    std::optional<Op> only;
};

struct RunResult {
    Json report;
    std::optional<Trajectory> trajectory;
    // One line per report-only property that came out violated.
    std::vector<std::string> violations;
};

// Runs the scenario's analyses. Numerical failures propagate as
// IntegrationError.
RunResult execute(const Scenario& scenario, const RunOptions& opts);

// Reads, validates, runs and writes artifacts. Returns the process exit
// status; diagnostics go to `err`. No file is written unless the run
// completes.
int run_config(const std::filesystem::path& config, const RunOptions& opts, std::ostream& err);

// Contents of manifest.json.
Json manifest(const Scenario& scenario, const RunOptions& opts, double wall_seconds,
              const std::vector<std::string>& artifacts);

}  // namespace hopnet::cli
