#pragma once

// Run-time and post-hoc quality measures: crossing detection, distance to the
// reference solution, norm and equivariance monitors.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bohmgrid/wavestate.hpp"

namespace bohm {

// Adjacent trajectories met or swapped order. pair_index is the left index of
// the offending adjacent pair.
struct CrossingEvent {
  int step = 0;
  double time = 0.0;
  std::size_t pair_index = 0;
};

struct Outcome {
  enum class Kind { Completed, Crossed, Failed };
  Kind kind = Kind::Completed;
  int step = 0;        // last executed step (Completed) or terminal step
  double time = 0.0;   // simulation time of the terminal event
  std::size_t pair_index = 0;  // Crossed only
  std::string reason;          // Failed only
};

struct TimeValue {
  double time = 0.0;
  double value = 0.0;
};

// History of a run: snapshots at a configured stride plus diagnostic series.
// min_spacing is recorded every step; the L2 error, norm and equivariance
// residual only at snapshots (they need per-point evaluations).
struct RunRecord {
  std::vector<int> snapshot_steps;
  std::vector<WaveState> snapshots;
  std::vector<TimeValue> min_spacing_series;
  std::vector<TimeValue> l2_error_series;   // empty without a reference state
  std::vector<TimeValue> norm_series;
  std::vector<TimeValue> equivariance_series;
  Outcome outcome;
};

// Returns the event iff the minimum adjacent spacing is <= 0 (a gap of
// exactly zero already counts as a crossing). Empty iff the positions are
// strictly increasing.
std::optional<CrossingEvent> check_crossing(const WaveState& state);

// sqrt( sum_{j=0}^{n-2} (q_{j+1} - q_j) * |psi(q_{j+1}, t) - e^{C_{j+1}} e^{i S_{j+1}}|^2 ),
// the forward-difference Riemann sum of the L2 distance to the reference
// solution (right-endpoint values; the j = 0 term is dropped).
double l2_error(const WaveState& state, const AnalyticState& reference);

// Midpoint-weighted Riemann sum of exp(2C): interior points carry
// (q_{j+1} - q_{j-1})/2, the endpoints their one-sided half intervals.
double riemann_norm(const WaveState& state);

// max over interior j of | exp(2 C_j) * (q_{j+1} - q_{j-1})/2 - 1/n |:
// how far the evolved grid has drifted from carrying equal probability mass
// per point. Zero (to rounding) for a freshly built quantile grid.
double equivariance_residual(const WaveState& state);

}  // namespace bohm
