#pragma once

// Initial grid-point construction: uniform spans, equal-probability-mass
// (quantile) grids built from the recurrence
//
//   rho(q_j) * (q_{j+1} - q_{j-1}) / 2 = 1/n,
//
// and density-distributed random sampling with a minimum-spacing rule.

#include <cstdint>
#include <functional>
#include <vector>

#include "bohmgrid/wavestate.hpp"

namespace bohm {

struct GridSpec {
  enum class Kind { Uniform, Quantile, RandomSampled };
  Kind kind = Kind::Uniform;
  int count = 51;
  double lo = -8.0;             // Uniform
  double hi = 8.0;              // Uniform
  double start_hint = 0.0;      // Quantile: point near the density maximum
  std::uint64_t seed = 0;       // RandomSampled
  double min_spacing_time_ratio = 10.0;  // RandomSampled safety factor

  void validate() const;
};

// count evenly spaced points spanning [lo, hi] inclusive. count >= 2.
std::vector<double> uniform_grid(double lo, double hi, int count);

// Equal-mass grid for |psi(x, 0)|^2: shoots the recurrence outward from a
// tuned seed pair near the distribution median, so every interior point
// carries mass 1/count exactly. start_hint must sit in a high-density region
// (validated; the seed tuning handles the rest). Throws NodeEncounteredError
// when the construction runs into a node (shift start_hint and retry) and
// InitFailureError when no monotone grid exists for this count.
std::vector<double> quantile_grid(const AnalyticState& state, int count,
                                  double start_hint);

// Same construction for an arbitrary density on [domain_lo, domain_hi].
// The density need not be normalized; each point carries mass 1/count in the
// density's own units.
std::vector<double> quantile_grid(const std::function<double(double)>& density,
                                  double domain_lo, double domain_hi, int count,
                                  double start_hint);

// count sorted samples of the |psi(x, 0)|^2 density via inverse-CDF sampling
// on a fine quadrature table (deterministic for a fixed seed). Adjacent pairs
// whose time-to-collision (spacing / |dv|, dv from the analytic initial
// velocities) is <= ratio * dt are thinned and resampled; pairs with dv == 0
// are exempt. Throws InitFailureError when the rule cannot be satisfied.
std::vector<double> random_grid(const AnalyticState& state, int count,
                                std::uint64_t seed, double dt, double ratio);

// Dispatch on GridSpec::kind; used by the CLI.
std::vector<double> build_grid(const GridSpec& spec, const AnalyticState& state,
                               double dt);

}  // namespace bohm
