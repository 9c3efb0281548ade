#pragma once

// Explicit time integration of the hydrodynamic equations along the grid:
//
//   dq/dt = S'(q)
//   dC/dt = -S''(q) / 2                 (C = ln R)
//   dS/dt = v^2/2 - V(q) - Q(q)         with quantum potential
//   Q     = -(C'' + C'^2) / 2  ==  -R''/(2R)
//
// One forward-Euler step splits into two sweeps. Phase A reads only the old
// state: fit C on the old positions, evaluate Q at the pre-move position of
// each point, advance S and move the points with the old velocities. Phase B
// reads the new positions and the new S: refit S there, read off the new
// velocities from S' and advance C with S''. Every per-index computation in
// a sweep depends only on the sweep's input snapshot, so the result is
// independent of evaluation order.

#include <functional>
#include <optional>
#include <vector>

#include "bohmgrid/diagnostics.hpp"
#include "bohmgrid/fitting.hpp"
#include "bohmgrid/wavestate.hpp"

namespace bohm {

struct StepConfig {
  double dt = 1e-2;
  FitPolicy amp_policy;    // fit of C = ln R
  FitPolicy phase_policy;  // fit of S
  Potential potential = Potential::free();

  void validate() const;
};

// Q(x) = -(C''(x) + C'(x)^2) / 2 off a local fit of C.
double quantum_potential_at(const FitResult& amp_fit, double x);

// One step of the two-sweep update. Throws NumericalBlowupError when an
// updated quantity leaves the representable range; fit errors propagate with
// the offending grid index attached.
WaveState step(const WaveState& state, const StepConfig& cfg);

// Called after every completed step with (step_index, new_state).
using StepMonitor = std::function<void(int, const WaveState&)>;

struct RunOptions {
  int snapshot_stride = 1;
  // Reference solution for the L2-error series; the series stays empty
  // without it.
  std::optional<AnalyticState> reference;
  std::vector<StepMonitor> monitors;
};

// Iterates step(), checking for trajectory crossings after every step.
// A crossing or a step failure ends the run early and is recorded in the
// returned record's outcome; both are results, not exceptions.
RunRecord run(const WaveState& initial, const StepConfig& cfg, int num_steps,
              const RunOptions& options = {});

}  // namespace bohm
