#include "bohmgrid/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "bohmgrid/errors.hpp"
#include "bohmgrid/kernels.hpp"

namespace bohm {

namespace {

// Anything beyond this magnitude is treated as blow-up: the boundary error
// mode grows super-exponentially, so it must be caught before it turns into
// inf/NaN arithmetic.
constexpr double kBlowupLimit = 1e300;

void check_bounded(const std::vector<double>& values, const char* label, double time) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j]) || std::abs(values[j]) > kBlowupLimit) {
      throw NumericalBlowupError(std::string(label) + " blew up at grid index " +
                                     std::to_string(j) + ", t = " + std::to_string(time),
                                 -1, static_cast<std::ptrdiff_t>(j));
    }
  }
}

}  // namespace

void StepConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInputError("StepConfig.dt must be finite and positive");
  }
  amp_policy.validate();
  phase_policy.validate();
}

double quantum_potential_at(const FitResult& amp_fit, double x) {
  const double c1 = eval_fit(amp_fit, x, 1);
  const double c2 = eval_fit(amp_fit, x, 2);
  return -0.5 * (c2 + c1 * c1);
}

WaveState step(const WaveState& state, const StepConfig& cfg) {
  cfg.validate();
  const std::size_t n = state.size();
  if (n < 4) {
    throw InvalidInputError("step needs at least 4 grid points");
  }

  WaveState next;
  next.time = state.time + cfg.dt;
  next.positions = state.positions;
  next.phase.resize(n);
  next.velocity.resize(n);
  next.log_amp.resize(n);

  // Phase A: advance S with the quantum potential from the C-fit at the old
  // positions, then move the points with the old velocities.
  for (std::size_t j = 0; j < n; ++j) {
    const FitResult amp_fit =
        fit_at_point(state.positions, state.log_amp, static_cast<int>(j), cfg.amp_policy);
    const double q_j = state.positions[j];
    const double quantum = quantum_potential_at(amp_fit, q_j);
    const double v = state.velocity[j];
    next.phase[j] =
        state.phase[j] + (0.5 * v * v - cfg.potential(q_j) - quantum) * cfg.dt;
  }
  kernels::scaled_add(cfg.dt, state.velocity.data(), next.positions.data(), n);
  check_bounded(next.phase, "phase", next.time);
  check_bounded(next.positions, "position", next.time);

  // Phase B: refit S on the new positions; velocities from S', C from S''.
  for (std::size_t j = 0; j < n; ++j) {
    const FitResult phase_fit =
        fit_at_point(next.positions, next.phase, static_cast<int>(j), cfg.phase_policy);
    const double q_j = next.positions[j];
    next.velocity[j] = eval_fit(phase_fit, q_j, 1);
    next.log_amp[j] = state.log_amp[j] - 0.5 * eval_fit(phase_fit, q_j, 2) * cfg.dt;
  }
  check_bounded(next.velocity, "velocity", next.time);
  check_bounded(next.log_amp, "log-amplitude", next.time);

  return next;
}

RunRecord run(const WaveState& initial, const StepConfig& cfg, int num_steps,
              const RunOptions& options) {
  if (num_steps < 1) {
    throw InvalidInputError("run needs num_steps >= 1");
  }
  if (options.snapshot_stride < 1) {
    throw InvalidInputError("run needs snapshot_stride >= 1");
  }
  cfg.validate();
  validate_for_dynamics(initial);

  RunRecord record;
  const auto take_snapshot = [&](int step_index, const WaveState& ws) {
    record.snapshot_steps.push_back(step_index);
    record.snapshots.push_back(ws);
    record.norm_series.push_back({ws.time, riemann_norm(ws)});
    record.equivariance_series.push_back({ws.time, equivariance_residual(ws)});
    if (options.reference) {
      record.l2_error_series.push_back({ws.time, l2_error(ws, *options.reference)});
    }
  };

  {
    const auto gap = kernels::min_adjacent_gap(initial.positions.data(), initial.size());
    record.min_spacing_series.push_back({initial.time, gap.gap});
  }
  take_snapshot(0, initial);

  WaveState current = initial;
  record.outcome = Outcome{Outcome::Kind::Completed, num_steps, 0.0, 0, {}};
  for (int k = 1; k <= num_steps; ++k) {
    WaveState nextState;
    try {
      nextState = step(current, cfg);
    } catch (const Error& e) {
      record.outcome =
          Outcome{Outcome::Kind::Failed, k, current.time + cfg.dt, 0, e.what()};
      return record;
    }
    current = std::move(nextState);

    const auto gap = kernels::min_adjacent_gap(current.positions.data(), current.size());
    record.min_spacing_series.push_back({current.time, gap.gap});
    for (const auto& monitor : options.monitors) {
      monitor(k, current);
    }
    if (const auto crossing = check_crossing(current)) {
      record.outcome = Outcome{Outcome::Kind::Crossed, k, current.time,
                               crossing->pair_index, {}};
      take_snapshot(k, current);
      return record;
    }
    if (k % options.snapshot_stride == 0) {
      take_snapshot(k, current);
    }
  }
  if (record.snapshot_steps.back() != num_steps) {
    take_snapshot(num_steps, current);
  }
  record.outcome.time = current.time;
  return record;
}

}  // namespace bohm
