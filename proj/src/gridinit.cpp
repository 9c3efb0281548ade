#include "bohmgrid/gridinit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>

#include "bohmgrid/errors.hpp"

namespace bohm {

namespace {

constexpr int kCdfTablePoints = 100000;
constexpr double kEq9Tolerance = 1e-6;

// Cumulative mass table on a fixed abscissa, trapezoidal rule. The density
// does not have to be normalized; total() reports whatever mass the domain
// holds.
class CdfTable {
 public:
  CdfTable(const std::function<double(double)>& density, double lo, double hi) {
    xs_.resize(kCdfTablePoints + 1);
    cum_.resize(kCdfTablePoints + 1);
    const double dx = (hi - lo) / kCdfTablePoints;
    double prev = std::max(density(lo), 0.0);
    xs_[0] = lo;
    cum_[0] = 0.0;
    for (int i = 1; i <= kCdfTablePoints; ++i) {
      xs_[i] = lo + i * dx;
      const double cur = std::max(density(xs_[i]), 0.0);
      cum_[i] = cum_[i - 1] + 0.5 * (prev + cur) * dx;
      prev = cur;
    }
    if (!(cum_.back() > 0.0) || !std::isfinite(cum_.back())) {
      throw InitFailureError("density carries no mass on the sampling domain");
    }
  }

  double total() const { return cum_.back(); }

  double mass_below(double x) const {
    if (x <= xs_.front()) return 0.0;
    if (x >= xs_.back()) return total();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double frac = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return cum_[i] + frac * (cum_[i + 1] - cum_[i]);
  }

  double invert(double mass) const {
    if (mass <= 0.0) return xs_.front();
    if (mass >= total()) return xs_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), mass);
    std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    if (i > 0) --i;
    while (i + 1 < cum_.size() && cum_[i + 1] <= cum_[i]) ++i;  // flat stretch
    if (i + 1 >= cum_.size()) return xs_.back();
    const double frac = (mass - cum_[i]) / (cum_[i + 1] - cum_[i]);
    return xs_[i] + frac * (xs_[i + 1] - xs_[i]);
  }

 private:
  std::vector<double> xs_;
  std::vector<double> cum_;
};

// One outward march of the equal-mass recurrence
//   q_{j+1} = q_{j-1} + 2/(n rho(q_j))   (or its mirror image),
// started from a seed pair near the distribution center. Returns how many
// points were placed before the chain folded, left the domain, or hit the
// node floor. Every placed point satisfies its recurrence relation to
// machine precision by construction.
struct MarchResult {
  int placed = 0;
  bool floor_death = false;
  std::vector<double> chain;  // seed pair first, then the placed points
};

MarchResult march_outward(const std::function<double(double)>& density,
                          double seed_far, double seed_near, int to_place, int n,
                          double domain_edge, double direction) {
  MarchResult m;
  m.chain = {seed_far, seed_near};
  double prev = seed_far;
  double cur = seed_near;
  for (int k = 0; k < to_place; ++k) {
    const double rho = density(cur);
    if (!(rho >= kNodeFloor)) {
      m.floor_death = true;
      return m;
    }
    const double next = prev + direction * 2.0 / (static_cast<double>(n) * rho);
    if (!((next - cur) * direction > 0.0) || (next - domain_edge) * direction > 0.0 ||
        !std::isfinite(next)) {
      return m;
    }
    m.chain.push_back(next);
    prev = cur;
    cur = next;
    m.placed = k + 1;
  }
  return m;
}

// Builds the equal-mass grid by shooting the recurrence outward from a
// central seed pair (q_c, q_c + g) and tuning the pair so both outward
// chains stay monotone all the way into the tails. The tuning is a pattern
// search that keeps, among fully surviving seeds, the one nearest the CDF
// partition (which is itself the midpoint-rule solution of the same
// equations, so it seeds the search and resolves the wide-window case of
// benign densities to the canonical grid).
//
// A single left-to-right march is hopeless here: the three-term recurrence
// carries a parasitic mode that grows in both directions (the two
// characteristic roots multiply to -1), so the monotone solutions form a
// narrow seed window that must be searched for, not stepped into.
std::vector<double> solve_equal_mass(const std::function<double(double)>& density,
                                     const CdfTable& cdf, int count) {
  const int n = count;
  const double total = cdf.total();
  const double tail = 0.5 * (total - (n - 1.0) / n);
  if (!(tail > 0.0)) {
    throw InitFailureError("density mass " + std::to_string(total) +
                           " is too small to host " + std::to_string(n) +
                           " equal-mass points");
  }
  const auto level = [&](int j) { return tail + j * (total - 2.0 * tail) / (n - 1); };

  const int c = n / 2;          // seed pair sits at indices c, c+1
  const int n_right = n - 2 - c;
  const int n_left = c;
  const double ref_c = cdf.invert(level(c));
  const double ref_gap = cdf.invert(level(c + 1)) - ref_c;
  if (!(ref_gap > 0.0)) {
    throw InitFailureError("equal-mass seed collapsed; the density may be too peaked");
  }

  const double domain_lo = cdf.invert(0.0);
  const double domain_hi = cdf.invert(total);
  bool saw_floor_death = false;
  const auto try_seed = [&](double qc, double gap, MarchResult& right, MarchResult& left) {
    right = march_outward(density, qc, qc + gap, n_right, n, domain_hi, +1.0);
    left = march_outward(density, qc + gap, qc, n_left, n, domain_lo, -1.0);
    saw_floor_death = saw_floor_death || right.floor_death || left.floor_death;
    return right.placed == n_right && left.placed == n_left;
  };

  double cx = ref_c;
  double cy = ref_gap;
  double hx = 0.5 * ref_gap;
  double hy = 0.5 * ref_gap;
  MarchResult right, left;
  for (int round = 0; round < 60; ++round) {
    int best_score = -1;
    double best_qc = cx, best_gap = cy;
    double full_qc = 0.0, full_gap = 0.0, full_dist = 0.0;
    bool any_full = false;
    for (int i = -3; i <= 3; ++i) {
      for (int j = -3; j <= 3; ++j) {
        const double qc = cx + i * hx / 3.0;
        const double gap = cy + j * hy / 3.0;
        if (!(gap > 0.0)) continue;
        const bool full = try_seed(qc, gap, right, left);
        const int score = std::min(right.placed, left.placed);
        if (score > best_score) {
          best_score = score;
          best_qc = qc;
          best_gap = gap;
        }
        if (full) {
          const double dx = (qc - ref_c) / ref_gap;
          const double dy = (gap - ref_gap) / ref_gap;
          const double dist = dx * dx + dy * dy;
          if (!any_full || dist < full_dist) {
            any_full = true;
            full_dist = dist;
            full_qc = qc;
            full_gap = gap;
          }
        }
      }
    }
    if (any_full) {
      cx = full_qc;
      cy = full_gap;
    } else {
      cx = best_qc;
      cy = best_gap;
    }
    hx *= 0.45;
    hy *= 0.45;
  }

  if (!try_seed(cx, cy, right, left)) {
    if (saw_floor_death) {
      throw NodeEncounteredError(
          "equal-mass construction ran into a node of the density; "
          "start from a slightly shifted initial grid point",
          cx);
    }
    throw InitFailureError("equal-mass construction found no monotone grid; "
                           "try shifting start_hint or lowering count");
  }

  std::vector<double> q;
  q.reserve(static_cast<std::size_t>(n));
  for (auto it = left.chain.rbegin(); it != left.chain.rend() - 2; ++it) {
    q.push_back(*it);
  }
  q.push_back(cx);
  q.push_back(cx + cy);
  for (std::size_t k = 2; k < right.chain.size(); ++k) {
    q.push_back(right.chain[k]);
  }
  return q;
}

std::vector<double> quantile_grid_impl(const std::function<double(double)>& density,
                                       double domain_lo, double domain_hi, int count,
                                       double start_hint) {
  if (count < 4) {
    throw InvalidInputError("quantile_grid needs count >= 4");
  }
  if (!(domain_hi > domain_lo)) {
    throw InvalidInputError("quantile_grid needs domain_hi > domain_lo");
  }
  if (!(density(start_hint) >= kNodeFloor)) {
    throw NodeEncounteredError(
        "start_hint lies in a node region; shift it towards the density maximum",
        start_hint);
  }

  const CdfTable cdf(density, domain_lo, domain_hi);
  std::vector<double> grid = solve_equal_mass(density, cdf, count);

  // Construction guarantees, checked rather than assumed.
  const double target = 1.0 / count;
  for (int j = 1; j + 1 < count; ++j) {
    const double mass = density(grid[j]) * 0.5 * (grid[j + 1] - grid[j - 1]);
    if (std::abs(mass - target) > kEq9Tolerance) {
      throw InitFailureError("equal-mass residual exceeded tolerance at index " +
                             std::to_string(j));
    }
  }
  for (int j = 0; j < count; ++j) {
    if (!(density(grid[j]) >= kNodeFloor)) {
      throw NodeEncounteredError("quantile grid point " + std::to_string(j) +
                                     " fell into a node",
                                 grid[j]);
    }
  }
  return grid;
}

// Domain wide enough that the neglected tails sit at the node floor.
void analytic_domain(const AnalyticState& state, double& lo, double& hi) {
  lo = state.packets().front().center;
  hi = lo;
  double pad = 0.0;
  for (const auto& p : state.packets()) {
    lo = std::min(lo, p.center);
    hi = std::max(hi, p.center);
    pad = std::max(pad, 12.0 * std::sqrt(0.5 * p.sigma));
  }
  lo -= pad;
  hi += pad;
}

}  // namespace

void GridSpec::validate() const {
  if (count < 4) {
    throw InvalidInputError("GridSpec.count must be >= 4");
  }
  if (kind == Kind::Uniform && !(hi > lo)) {
    throw InvalidInputError("GridSpec needs hi > lo for a uniform grid");
  }
  if (kind == Kind::RandomSampled && !(min_spacing_time_ratio > 0.0)) {
    throw InvalidInputError("GridSpec.min_spacing_time_ratio must be > 0");
  }
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 2) {
    throw InvalidInputError("uniform_grid needs count >= 2");
  }
  if (!(hi > lo)) {
    throw InvalidInputError("uniform_grid needs hi > lo");
  }
  std::vector<double> q(static_cast<std::size_t>(count));
  const double spacing = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    q[static_cast<std::size_t>(i)] = lo + i * spacing;
  }
  q.back() = hi;
  return q;
}

std::vector<double> quantile_grid(const AnalyticState& state, int count,
                                  double start_hint) {
  double lo, hi;
  analytic_domain(state, lo, hi);
  const auto density = [&state](double x) { return analytic_density(state, 0.0, x); };
  return quantile_grid_impl(density, lo, hi, count, start_hint);
}

std::vector<double> quantile_grid(const std::function<double(double)>& density,
                                  double domain_lo, double domain_hi, int count,
                                  double start_hint) {
  return quantile_grid_impl(density, domain_lo, domain_hi, count, start_hint);
}

std::vector<double> random_grid(const AnalyticState& state, int count,
                                std::uint64_t seed, double dt, double ratio) {
  if (count < 4) {
    throw InvalidInputError("random_grid needs count >= 4");
  }
  if (!(dt > 0.0) || !(ratio > 0.0)) {
    throw InvalidInputError("random_grid needs positive dt and ratio");
  }
  double lo, hi;
  analytic_domain(state, lo, hi);
  const auto density = [&state](double x) { return analytic_density(state, 0.0, x); };
  const CdfTable cdf(density, lo, hi);
  const double total = cdf.total();

  std::mt19937_64 rng(seed);

  // A superposition with purely real weights starts at rest, which makes the
  // spacing rule vacuous.
  bool at_rest = true;
  for (const auto& p : state.packets()) {
    if (p.weight.imag() != 0.0) at_rest = false;
  }

  struct Sample {
    double q;
    double v;
    bool operator<(const Sample& other) const { return q < other.q; }
  };
  const auto draw = [&]() {
    // 53-bit mantissa draw; uniform in [0, 1).
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double x = cdf.invert(u * total);
    return Sample{x, at_rest ? 0.0 : analytic_velocity(state, 0.0, x)};
  };

  std::vector<Sample> samples(static_cast<std::size_t>(count));
  for (auto& s : samples) s = draw();
  std::sort(samples.begin(), samples.end());

  const int max_attempts = 50 * count + 100;
  for (int attempt = 0;; ++attempt) {
    std::ptrdiff_t bad = -1;
    for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
      const double spacing = samples[j + 1].q - samples[j].q;
      if (spacing <= 0.0) {  // duplicate draw; always thin
        bad = static_cast<std::ptrdiff_t>(j);
        break;
      }
      const double dv = samples[j + 1].v - samples[j].v;
      if (dv != 0.0 && spacing / std::abs(dv) <= ratio * dt) {
        bad = static_cast<std::ptrdiff_t>(j);
        break;
      }
    }
    if (bad < 0) break;
    if (attempt >= max_attempts) {
      throw InitFailureError(
          "random grid could not satisfy the minimum-spacing rule after " +
          std::to_string(max_attempts) + " resamples; lower the ratio or dt");
    }
    samples.erase(samples.begin() + bad + 1);
    const Sample replacement = draw();
    samples.insert(std::upper_bound(samples.begin(), samples.end(), replacement),
                   replacement);
  }
  std::vector<double> q(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) q[j] = samples[j].q;
  return q;
}

std::vector<double> build_grid(const GridSpec& spec, const AnalyticState& state,
                               double dt) {
  spec.validate();
  switch (spec.kind) {
    case GridSpec::Kind::Uniform:
      return uniform_grid(spec.lo, spec.hi, spec.count);
    case GridSpec::Kind::Quantile:
      return quantile_grid(state, spec.count, spec.start_hint);
    case GridSpec::Kind::RandomSampled:
      return random_grid(state, spec.count, spec.seed, dt, spec.min_spacing_time_ratio);
  }
  throw InvalidInputError("unknown grid kind");
}

}  // namespace bohm
