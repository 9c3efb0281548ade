#pragma once

// Run configuration: a flat key-value format with section headers, parsed
// fail-closed (unknown sections or keys are errors). Two configurations ship
// built in under the names "paper_polyfit" and "paper_lsq": the reference
// two-packet experiment with exact polynomial fitting respectively mild
// least-squares fitting in the interior.

#include <filesystem>
#include <string>
#include <vector>

#include "bohmgrid/dynamics.hpp"
#include "bohmgrid/gridinit.hpp"
#include "bohmgrid/wavestate.hpp"

namespace bohm {

struct OutputOptions {
  std::filesystem::path directory = "out";
  int snapshot_stride = 1;
  bool emit_trajectories = true;
  bool emit_fields = false;
  bool emit_errors = true;
  bool emit_summary = true;
  std::vector<double> fields_times;  // snapshot times for emit_fields
};

struct RunConfig {
  std::vector<GaussianPacket> packets;
  GridSpec grid;
  double dt = 1e-2;
  int num_steps = 1;
  FitPolicy amp_policy;
  FitPolicy phase_policy;
  OutputOptions output;

  AnalyticState analytic_state() const { return AnalyticState(packets); }
  StepConfig step_config() const;
  void validate() const;  // throws ConfigError naming the offending field
};

// Names accepted by load_config in place of a file path.
std::vector<std::string> bundled_config_names();
bool is_bundled_config(const std::string& name);
std::string bundled_config_text(const std::string& name);

// Parses either a bundled name or a config file. Parse errors carry the
// 1-based line number; validation errors name the field.
RunConfig load_config(const std::string& path_or_name);

// Parses config text directly; `source` only labels error messages.
RunConfig parse_config(const std::string& text, const std::string& source);

}  // namespace bohm
