#include "bohmgrid/wavestate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "bohmgrid/errors.hpp"

namespace bohm {

namespace {

constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

// Packet value and the logarithmic derivative dg/dx / g, evaluated together
// since the velocity field needs both.
struct PacketEval {
  cplx value;
  cplx dlog;
};

PacketEval eval_packet(const GaussianPacket& p, double t, double x) {
  const cplx i_t(0.0, t);
  const double dx = x - p.center;
  const double denom = p.sigma * p.sigma + t * t;
  const cplx shape = cplx(p.sigma, 0.0) - i_t;  // sigma - i t
  const cplx prefactor =
      std::pow(p.sigma / (kPi * (cplx(p.sigma, 0.0) + i_t) * (cplx(p.sigma, 0.0) + i_t)), 0.25);
  const cplx value = p.weight * prefactor * std::exp(-dx * dx / (2.0 * denom) * shape);
  const cplx dlog = -dx * shape / denom;
  return {value, dlog};
}

}  // namespace

AnalyticState::AnalyticState(std::vector<GaussianPacket> packets)
    : packets_(std::move(packets)) {
  if (packets_.empty()) {
    throw InvalidInputError("AnalyticState needs at least one packet");
  }
  for (const auto& p : packets_) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma) || !std::isfinite(p.center) ||
        !std::isfinite(p.weight.real()) || !std::isfinite(p.weight.imag())) {
      throw InvalidInputError("AnalyticState packet has non-finite or non-positive parameters");
    }
  }
}

Potential Potential::free() { return Potential{}; }

Potential Potential::tabulated(std::function<double(double)> eval) {
  Potential p;
  p.eval_ = std::move(eval);
  return p;
}

std::complex<double> analytic_psi(const AnalyticState& state, double t, double x) {
  cplx acc(0.0, 0.0);
  for (const auto& p : state.packets()) {
    acc += eval_packet(p, t, x).value;
  }
  return acc;
}

double analytic_density(const AnalyticState& state, double t, double x) {
  return std::norm(analytic_psi(state, t, x));
}

double analytic_velocity(const AnalyticState& state, double t, double x,
                         double node_floor) {
  cplx psi(0.0, 0.0);
  cplx dpsi(0.0, 0.0);
  for (const auto& p : state.packets()) {
    const PacketEval e = eval_packet(p, t, x);
    psi += e.value;
    dpsi += e.value * e.dlog;
  }
  if (std::norm(psi) < node_floor) {
    throw NodeEvaluationError("analytic_velocity evaluated at a node of |psi|^2");
  }
  return std::imag(dpsi / psi);
}

WaveState init_from_analytic(const AnalyticState& state,
                             std::span<const double> positions) {
  const std::size_t n = positions.size();
  if (n == 0) {
    throw InvalidInputError("init_from_analytic needs at least one position");
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!(positions[j + 1] > positions[j])) {
      throw InvalidInputError("init positions must be strictly increasing (index " +
                              std::to_string(j + 1) + ")");
    }
  }
  WaveState ws;
  ws.time = 0.0;
  ws.positions.assign(positions.begin(), positions.end());
  ws.log_amp.resize(n);
  ws.phase.resize(n);
  ws.velocity.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx psi = analytic_psi(state, 0.0, positions[j]);
    const double rho = std::norm(psi);
    if (rho < kNodeFloor) {
      throw NodeEvaluationError(
          "initial position " + std::to_string(positions[j]) + " (index " +
              std::to_string(j) + ") lies at a node of |psi|^2",
          static_cast<std::ptrdiff_t>(j));
    }
    ws.log_amp[j] = 0.5 * std::log(rho);
    ws.phase[j] = std::arg(psi);
    ws.velocity[j] = analytic_velocity(state, 0.0, positions[j]);
  }
  return ws;
}

void validate_for_dynamics(const WaveState& state) {
  const std::size_t n = state.size();
  if (n < 4) {
    throw InvalidInputError("dynamics needs at least 4 grid points");
  }
  if (state.log_amp.size() != n || state.phase.size() != n || state.velocity.size() != n) {
    throw InvalidInputError("WaveState field lengths differ");
  }
  if (!std::isfinite(state.time)) {
    throw InvalidInputError("WaveState time is not finite");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(state.positions[j]) || !std::isfinite(state.log_amp[j]) ||
        !std::isfinite(state.phase[j]) || !std::isfinite(state.velocity[j])) {
      throw InvalidInputError("WaveState entry " + std::to_string(j) + " is not finite");
    }
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!(state.positions[j + 1] > state.positions[j])) {
      throw InvalidInputError("WaveState positions not strictly increasing at index " +
                              std::to_string(j + 1));
    }
  }
}

}  // namespace bohm
