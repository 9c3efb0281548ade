// Integrator: the quantum potential, the two-sweep step, and run() outcomes.

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "bohmgrid/dynamics.hpp"
#include "bohmgrid/errors.hpp"
#include "bohmgrid/gridinit.hpp"
#include "bohmgrid/kernels.hpp"

using namespace bohm;

namespace {

FitPolicy paper_exact_policy() {
  FitPolicy p;
  p.estimator = Estimator::ExactPolynomial;
  p.basis_count = 7;
  p.interior_half_width = 3;
  p.boundary_degree = 2;
  p.boundary_extension = 7;
  return p;
}

// Small policy for synthetic grids: window 3 interior (quadratic), boundary
// window 4 at degree 2.
FitPolicy small_policy() {
  FitPolicy p;
  p.estimator = Estimator::ExactPolynomial;
  p.basis_count = 3;
  p.interior_half_width = 1;
  p.boundary_degree = 2;
  p.boundary_extension = 1;
  return p;
}

StepConfig small_config(double dt = 0.01) {
  StepConfig cfg;
  cfg.dt = dt;
  cfg.amp_policy = small_policy();
  cfg.phase_policy = small_policy();
  return cfg;
}

WaveState flat_state(std::vector<double> positions) {
  WaveState ws;
  const std::size_t n = positions.size();
  ws.positions = std::move(positions);
  ws.log_amp.assign(n, 0.0);
  ws.phase.assign(n, 0.0);
  ws.velocity.assign(n, 0.0);
  return ws;
}

}  // namespace

TEST_CASE("quantum potential from a fitted log-amplitude") {
  FitResult flat;
  flat.center = 0.0;
  flat.coefficients = {3.7};
  CHECK(quantum_potential_at(flat, 1.23) == 0.0);

  // C = -x^2 / (2 sigma^2), sigma = 4: Q(0) = 1/(2 sigma^2) = 1/32
  FitResult narrow;
  narrow.center = 0.0;
  narrow.coefficients = {0.0, 0.0, -1.0 / 32.0};
  CHECK(quantum_potential_at(narrow, 0.0) == doctest::Approx(0.03125).epsilon(1e-14));

  // C = -x^2/8 at x = 2: C' = -0.5, C'' = -0.25, Q = -(C'' + C'^2)/2 = 0
  FitResult packet;
  packet.center = 0.0;
  packet.coefficients = {0.0, 0.0, -1.0 / 8.0};
  CHECK(quantum_potential_at(packet, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(quantum_potential_at(packet, 0.0) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("a plane wave translates rigidly") {
  // C constant and S = k x: Q = 0 and S'' = 0, so q -> q + k dt,
  // S -> S + k^2 dt / 2, C and v unchanged.
  const double k = 0.7;
  const double dt = 0.01;
  WaveState ws = flat_state(uniform_grid(-5.0, 5.0, 21));
  for (std::size_t j = 0; j < ws.size(); ++j) {
    ws.phase[j] = k * ws.positions[j];
    ws.velocity[j] = k;
    ws.log_amp[j] = -0.4;
  }
  StepConfig cfg;
  cfg.dt = dt;
  cfg.amp_policy = paper_exact_policy();
  cfg.phase_policy = paper_exact_policy();
  cfg.amp_policy.boundary_extension = 3;
  cfg.phase_policy.boundary_extension = 3;

  WaveState cur = ws;
  const int steps = 10;
  for (int s = 0; s < steps; ++s) cur = step(cur, cfg);

  for (std::size_t j = 3; j + 3 < cur.size(); ++j) {  // interior points
    CHECK(cur.positions[j] ==
          doctest::Approx(ws.positions[j] + steps * k * dt).epsilon(1e-12));
    CHECK(cur.velocity[j] == doctest::Approx(k).epsilon(1e-10));
    CHECK(cur.log_amp[j] == doctest::Approx(-0.4).epsilon(1e-10));
    CHECK(cur.phase[j] == doctest::Approx(k * ws.positions[j] +
                                          steps * 0.5 * k * k * dt).epsilon(1e-10));
  }
  CHECK(cur.time == doctest::Approx(steps * dt));
}

TEST_CASE("one step of a packet at rest reproduces the analytic velocities") {
  const AnalyticState packet({GaussianPacket{{1.0, 0.0}, 0.0, 4.0}});
  const WaveState initial = init_from_analytic(packet, uniform_grid(-8.0, 8.0, 51));
  StepConfig cfg;
  cfg.dt = 0.01;
  cfg.amp_policy = paper_exact_policy();
  cfg.phase_policy = paper_exact_policy();

  const WaveState next = step(initial, cfg);
  CHECK(next.time == doctest::Approx(0.01));
  for (std::size_t j = 0; j < next.size(); ++j) {
    // velocities are still ~1e-4 here, so positions have not moved yet
    CHECK(next.positions[j] == initial.positions[j]);
    const double expected = analytic_velocity(packet, 0.01, next.positions[j]);
    CHECK(std::abs(next.velocity[j] - expected) < 1e-4);
  }
}

TEST_CASE("step results do not depend on the evaluation order") {
  const AnalyticState packet({GaussianPacket{{1.0, 0.0}, 0.0, 4.0}});
  const WaveState state = init_from_analytic(packet, uniform_grid(-6.0, 6.0, 25));
  StepConfig cfg;
  cfg.dt = 0.01;
  cfg.amp_policy = paper_exact_policy();
  cfg.phase_policy = paper_exact_policy();
  cfg.amp_policy.boundary_extension = 3;
  cfg.phase_policy.boundary_extension = 3;

  const WaveState forward = step(state, cfg);

  // Reversed-order re-implementation of the two sweeps.
  const std::size_t n = state.size();
  WaveState rev;
  rev.time = state.time + cfg.dt;
  rev.positions = state.positions;
  rev.phase.resize(n);
  rev.velocity.resize(n);
  rev.log_amp.resize(n);
  for (std::size_t jj = n; jj-- > 0;) {
    const FitResult amp_fit =
        fit_at_point(state.positions, state.log_amp, static_cast<int>(jj), cfg.amp_policy);
    const double q = quantum_potential_at(amp_fit, state.positions[jj]);
    const double v = state.velocity[jj];
    rev.phase[jj] = state.phase[jj] + (0.5 * v * v - q) * cfg.dt;
  }
  for (std::size_t jj = n; jj-- > 0;) {
    rev.positions[jj] = state.positions[jj] + cfg.dt * state.velocity[jj];
  }
  for (std::size_t jj = n; jj-- > 0;) {
    const FitResult phase_fit =
        fit_at_point(rev.positions, rev.phase, static_cast<int>(jj), cfg.phase_policy);
    rev.velocity[jj] = eval_fit(phase_fit, rev.positions[jj], 1);
    rev.log_amp[jj] = state.log_amp[jj] - 0.5 * eval_fit(phase_fit, rev.positions[jj], 2) * cfg.dt;
  }

  for (std::size_t j = 0; j < n; ++j) {
    CHECK(forward.positions[j] == rev.positions[j]);
    CHECK(forward.phase[j] == rev.phase[j]);
    CHECK(forward.velocity[j] == rev.velocity[j]);
    CHECK(forward.log_amp[j] == rev.log_amp[j]);
  }
}

TEST_CASE("a constant potential only advances the phase") {
  // Plane wave with V = V0: phase A picks up an extra -V0 dt per step and
  // nothing else changes (V0 is flat, so no force).
  const double k = 0.4, v0 = 2.5, dt = 0.01;
  WaveState ws = flat_state(uniform_grid(-5.0, 5.0, 21));
  for (std::size_t j = 0; j < ws.size(); ++j) {
    ws.phase[j] = k * ws.positions[j];
    ws.velocity[j] = k;
  }
  StepConfig cfg;
  cfg.dt = dt;
  cfg.amp_policy = paper_exact_policy();
  cfg.phase_policy = paper_exact_policy();
  cfg.amp_policy.boundary_extension = 3;
  cfg.phase_policy.boundary_extension = 3;
  cfg.potential = Potential::tabulated([v0](double) { return v0; });

  const WaveState next = step(ws, cfg);
  for (std::size_t j = 3; j + 3 < next.size(); ++j) {
    const double expected = k * ws.positions[j] + (0.5 * k * k - v0) * dt;
    CHECK(next.phase[j] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(next.velocity[j] == doctest::Approx(k).epsilon(1e-10));
    CHECK(std::abs(next.log_amp[j]) < 1e-12);
  }
}

TEST_CASE("scalar and avx2 kernel backends give matching dynamics") {
  if (!kernels::backend_available(kernels::Backend::Avx2)) return;
  const AnalyticState packet({GaussianPacket{{1.0, 0.0}, 0.0, 4.0}});
  StepConfig cfg;
  cfg.dt = 0.01;
  cfg.amp_policy = paper_exact_policy();
  cfg.phase_policy = paper_exact_policy();

  const auto run_with = [&](kernels::Backend backend) {
    kernels::force_backend(backend);
    WaveState cur = init_from_analytic(packet, uniform_grid(-8.0, 8.0, 51));
    for (int s = 0; s < 50; ++s) cur = step(cur, cfg);
    kernels::reset_backend();
    return cur;
  };
  const WaveState a = run_with(kernels::Backend::Scalar);
  const WaveState b = run_with(kernels::Backend::Avx2);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(std::abs(a.positions[j] - b.positions[j]) < 1e-10);
    CHECK(std::abs(a.velocity[j] - b.velocity[j]) < 1e-8);
    CHECK(std::abs(a.log_amp[j] - b.log_amp[j]) < 1e-8);
    CHECK(std::abs(a.phase[j] - b.phase[j]) < 1e-8);
  }
}

TEST_CASE("fit failures carry the grid index") {
  WaveState ws = flat_state({0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
  ws.positions[3] = ws.positions[2];  // exact duplicate
  try {
    (void)step(ws, small_config());
    FAIL("expected DegenerateStencilError");
  } catch (const DegenerateStencilError& e) {
    CHECK(std::string(e.what()).find("grid index") != std::string::npos);
  }
}

TEST_CASE("runaway quantities raise NumericalBlowup") {
  WaveState ws = flat_state(uniform_grid(0.0, 5.0, 6));
  ws.velocity.assign(6, 1e200);  // v^2/2 overflows the phase update
  CHECK_THROWS_AS((void)step(ws, small_config()), NumericalBlowupError);
}

TEST_CASE("run rejects zero steps and bad strides") {
  const WaveState ws = flat_state(uniform_grid(0.0, 5.0, 6));
  CHECK_THROWS_AS((void)run(ws, small_config(), 0), InvalidInputError);
  RunOptions opts;
  opts.snapshot_stride = 0;
  CHECK_THROWS_AS((void)run(ws, small_config(), 1, opts), InvalidInputError);
}

TEST_CASE("run detects an engineered crossing") {
  // Opposing velocities on the central pair cross it within one step; the
  // flat amplitude keeps the quantum potential at zero so nothing fights the
  // collision.
  WaveState ws = flat_state({0.0, 1.0, 2.0, 2.9, 4.0, 5.0});
  ws.velocity = {0.0, 0.0, 50.0, -50.0, 0.0, 0.0};

  const RunRecord record = run(ws, small_config(), 10);
  CHECK(record.outcome.kind == Outcome::Kind::Crossed);
  CHECK(record.outcome.step == 1);
  CHECK(record.outcome.time == doctest::Approx(0.01));
  CHECK(record.outcome.pair_index == 2);
  CHECK(record.min_spacing_series.back().value <= 0.0);
  // terminal state is recorded
  CHECK(record.snapshot_steps.back() == 1);
}

TEST_CASE("run completes and snapshots at the stride") {
  WaveState ws = flat_state({0.0, 1.0, 2.0, 2.9, 4.0, 5.0});
  ws.velocity = {0.0, 0.0, 0.1, -0.1, 0.0, 0.0};

  RunOptions opts;
  opts.snapshot_stride = 2;
  int monitor_calls = 0;
  opts.monitors.push_back([&monitor_calls](int, const WaveState&) { ++monitor_calls; });

  const RunRecord record = run(ws, small_config(), 5, opts);
  CHECK(record.outcome.kind == Outcome::Kind::Completed);
  CHECK(record.outcome.step == 5);
  CHECK(monitor_calls == 5);
  // steps 0, 2, 4 at the stride plus the final state
  CHECK(record.snapshot_steps == std::vector<int>{0, 2, 4, 5});
  CHECK(record.min_spacing_series.size() == 6);
  CHECK(record.l2_error_series.empty());  // no reference configured
  CHECK(record.norm_series.size() == record.snapshots.size());
}

TEST_CASE("run reports step failures as an outcome") {
  WaveState ws = flat_state(uniform_grid(0.0, 5.0, 6));
  ws.velocity.assign(6, 1e200);
  const RunRecord record = run(ws, small_config(), 3);
  CHECK(record.outcome.kind == Outcome::Kind::Failed);
  CHECK(record.outcome.step == 1);
  CHECK(!record.outcome.reason.empty());
}
