#pragma once

// Co-moving grid state and the closed-form reference solution.
//
// The wave function is stored in Euler form psi = R * exp(i*S) along a set of
// trajectory-ordered grid points. The amplitude is kept as C = ln R so the
// tails never underflow and the quantum potential becomes a polynomial in the
// derivatives of C. Units are dimensionless with m = hbar = 1.

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace bohm {

// |psi|^2 below this value counts as a node of the wave function.
inline constexpr double kNodeFloor = 1e-30;

// Snapshot of the co-moving grid. All four lists share one length and the
// j-th entries describe the same trajectory. Positions of a healthy state
// are strictly increasing; a sign flip in an adjacent gap is the trajectory
// crossing signal, which run-time checks detect and report (see diagnostics).
struct WaveState {
  std::vector<double> positions;  // q_j
  std::vector<double> log_amp;    // C_j = ln R(q_j, t)
  std::vector<double> phase;      // S_j = S(q_j, t)
  std::vector<double> velocity;   // v_j = dq_j/dt
  double time = 0.0;

  std::size_t size() const { return positions.size(); }
};

// One free Gaussian component:
//   g(t, x) = (sigma / (pi * (sigma + i t)^2))^(1/4)
//             * exp(-x^2 (sigma - i t) / (2 (sigma^2 + t^2)))
// which solves i dpsi/dt = -psi''/2. Note the width convention: at t = 0 the
// density is proportional to exp(-x^2/sigma), i.e. variance sigma/2.
struct GaussianPacket {
  std::complex<double> weight{1.0, 0.0};
  double center = 0.0;
  double sigma = 1.0;
};

// Superposition of free Gaussian packets; exact time-dependent solution used
// for initialization and error measurement. Immutable after construction.
class AnalyticState {
 public:
  explicit AnalyticState(std::vector<GaussianPacket> packets);

  const std::vector<GaussianPacket>& packets() const { return packets_; }

 private:
  std::vector<GaussianPacket> packets_;
};

// External potential V(q). The reference experiments are free (V = 0); a
// tabulated callback is accepted so driven variants can reuse the stepper.
class Potential {
 public:
  static Potential free();
  static Potential tabulated(std::function<double(double)> eval);

  double operator()(double x) const { return eval_ ? eval_(x) : 0.0; }
  bool is_free() const { return !eval_; }

 private:
  std::function<double(double)> eval_;
};

// psi(x, t) = sum_k w_k * g_k(t, x - c_k). Total function.
std::complex<double> analytic_psi(const AnalyticState& state, double t, double x);

// |psi(x, t)|^2.
double analytic_density(const AnalyticState& state, double t, double x);

// v = Im[dpsi/dx / psi] from the closed-form packet derivatives.
// Throws NodeEvaluationError when |psi|^2 < node_floor.
double analytic_velocity(const AnalyticState& state, double t, double x,
                         double node_floor = kNodeFloor);

// Samples the reference solution at t = 0:
//   C = ln|psi|, S = principal-branch phase, v = analytic_velocity.
// positions must be strictly increasing and clear of nodes.
WaveState init_from_analytic(const AnalyticState& state,
                             std::span<const double> positions);

// Checks the structural invariants the integrator relies on: equal lengths,
// n >= 4, finite entries, strictly increasing positions. Throws on violation.
void validate_for_dynamics(const WaveState& state);

}  // namespace bohm
