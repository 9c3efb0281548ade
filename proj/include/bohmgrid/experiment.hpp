#pragma once

// Experiment orchestration: grid construction, the run itself, and the file
// outputs (trajectories.csv, diagnostics.csv, fields_<step>.csv,
// summary.json). Everything here is also the library surface behind the CLI
// so tests can drive complete experiments in-process.

#include <filesystem>
#include <span>
#include <vector>

#include "bohmgrid/config.hpp"
#include "bohmgrid/diagnostics.hpp"

namespace bohm {

// Process exit codes: a crossing is a scientific result with its own code,
// not a crash.
inline constexpr int kExitCompleted = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCrossed = 3;
inline constexpr int kExitFailed = 4;

int exit_code_for(const Outcome& outcome);

struct ExperimentResult {
  RunRecord record;
  std::filesystem::path output_dir;
  double wall_seconds = 0.0;
  int exit_code = 0;
};

// Runs the configured experiment and writes the enabled outputs into the
// output directory (created if missing). The CSV outputs are deterministic:
// identical configs produce byte-identical files.
ExperimentResult run_experiment(const RunConfig& cfg);

// Dense sampling of the per-point fitted density and velocity field at the
// requested snapshot times. Each grid point's fit polynomial covers its
// half-interval neighborhood (the outermost points extend one unit outward);
// the merged curve is written next to the analytic reference values.
// Throws InvalidInputError listing the available times when a requested time
// is not in the snapshot set.
void emit_fitted_fields(const RunRecord& record, const RunConfig& cfg,
                        std::span<const double> times,
                        const std::filesystem::path& out_dir);

// Reconstructs the snapshots of a previous run from its trajectories.csv
// (written at full precision, so this is exact).
RunRecord load_record(const std::filesystem::path& dir);

// The resolved config is copied into the output directory under this name so
// `fields` can rebuild fits with the policies the run actually used.
std::filesystem::path resolved_config_path(const std::filesystem::path& dir);

}  // namespace bohm
