#include "bohmgrid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bohmgrid/errors.hpp"
#include "bohmgrid/kernels.hpp"

namespace bohm {

std::optional<CrossingEvent> check_crossing(const WaveState& state) {
  if (state.size() < 2) return std::nullopt;
  const auto gap = kernels::min_adjacent_gap(state.positions.data(), state.size());
  if (gap.gap <= 0.0) {
    return CrossingEvent{0, state.time, gap.index};
  }
  return std::nullopt;
}

double l2_error(const WaveState& state, const AnalyticState& reference) {
  const std::size_t n = state.size();
  if (n < 2) {
    throw InvalidInputError("l2_error needs at least two grid points");
  }
  std::vector<double> dq(n - 1);
  std::vector<double> diff2(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    dq[j] = state.positions[j + 1] - state.positions[j];
    const std::complex<double> simulated =
        std::exp(state.log_amp[j + 1]) *
        std::exp(std::complex<double>(0.0, state.phase[j + 1]));
    const std::complex<double> exact =
        analytic_psi(reference, state.time, state.positions[j + 1]);
    diff2[j] = std::norm(exact - simulated);
  }
  return std::sqrt(kernels::dot(dq.data(), diff2.data(), n - 1));
}

double riemann_norm(const WaveState& state) {
  const std::size_t n = state.size();
  if (n < 2) {
    throw InvalidInputError("riemann_norm needs at least two grid points");
  }
  std::vector<double> density(n);
  std::vector<double> width(n);
  for (std::size_t j = 0; j < n; ++j) {
    density[j] = std::exp(2.0 * state.log_amp[j]);
  }
  width[0] = 0.5 * (state.positions[1] - state.positions[0]);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    width[j] = 0.5 * (state.positions[j + 1] - state.positions[j - 1]);
  }
  width[n - 1] = 0.5 * (state.positions[n - 1] - state.positions[n - 2]);
  return kernels::dot(density.data(), width.data(), n);
}

double equivariance_residual(const WaveState& state) {
  const std::size_t n = state.size();
  if (n < 3) {
    throw InvalidInputError("equivariance_residual needs at least three grid points");
  }
  const double target = 1.0 / static_cast<double>(n);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double mass = std::exp(2.0 * state.log_amp[j]) * 0.5 *
                        (state.positions[j + 1] - state.positions[j - 1]);
    worst = std::max(worst, std::abs(mass - target));
  }
  return worst;
}

}  // namespace bohm
