#include "bohmgrid/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bohmgrid/errors.hpp"
#include "bohmgrid/kernels.hpp"

namespace bohm {

namespace {

// Condition estimates beyond this raise IllConditionedError: a near-duplicate
// pair of abscissae (imminent trajectory crossing) must surface as a
// diagnosable error instead of garbage coefficients.
constexpr double kConditionLimit = 1e12;

// Dense row-major square solver: Gaussian elimination with partial pivoting,
// one step of iterative refinement, and an explicit 1-norm condition
// estimate. Sizes here are tiny (m <= 17 for any sane policy), so the
// O(n^3) inverse probe for the condition number is cheap.
class SquareSolver {
 public:
  SquareSolver(std::vector<double> matrix, int n) : a_(std::move(matrix)), lu_(a_), n_(n) {
    piv_.resize(n_);
    for (int i = 0; i < n_; ++i) piv_[i] = i;
    factorize();
  }

  bool singular() const { return singular_; }

  // max_j sum_i |A_ij| of the original matrix.
  double norm1() const {
    double best = 0.0;
    for (int j = 0; j < n_; ++j) {
      double s = 0.0;
      for (int i = 0; i < n_; ++i) s += std::abs(a_[i * n_ + j]);
      best = std::max(best, s);
    }
    return best;
  }

  // Solves A x = b with one refinement pass against the unfactored matrix.
  std::vector<double> solve(std::span<const double> b) const {
    std::vector<double> x(b.begin(), b.end());
    solve_inplace(x);
    std::vector<double> r(n_);
    for (int i = 0; i < n_; ++i) {
      double acc = b[i];
      for (int j = 0; j < n_; ++j) acc -= a_[i * n_ + j] * x[j];
      r[i] = acc;
    }
    solve_inplace(r);
    for (int i = 0; i < n_; ++i) x[i] += r[i];
    return x;
  }

  // 1-norm condition estimate via the explicit inverse (column by column).
  double condition_estimate() const {
    if (singular_) return std::numeric_limits<double>::infinity();
    double inv_norm = 0.0;
    std::vector<double> col(n_);
    for (int j = 0; j < n_; ++j) {
      std::fill(col.begin(), col.end(), 0.0);
      col[j] = 1.0;
      solve_inplace(col);
      double s = 0.0;
      for (int i = 0; i < n_; ++i) s += std::abs(col[i]);
      inv_norm = std::max(inv_norm, s);
    }
    return norm1() * inv_norm;
  }

 private:
  void factorize() {
    for (int k = 0; k < n_; ++k) {
      int p = k;
      double best = std::abs(lu_[k * n_ + k]);
      for (int i = k + 1; i < n_; ++i) {
        const double cand = std::abs(lu_[i * n_ + k]);
        if (cand > best) {
          best = cand;
          p = i;
        }
      }
      if (best == 0.0) {
        singular_ = true;
        return;
      }
      if (p != k) {
        for (int j = 0; j < n_; ++j) std::swap(lu_[k * n_ + j], lu_[p * n_ + j]);
        std::swap(piv_[k], piv_[p]);
      }
      const double pivot = lu_[k * n_ + k];
      for (int i = k + 1; i < n_; ++i) {
        const double mult = lu_[i * n_ + k] / pivot;
        lu_[i * n_ + k] = mult;
        for (int j = k + 1; j < n_; ++j) lu_[i * n_ + j] -= mult * lu_[k * n_ + j];
      }
    }
  }

  void solve_inplace(std::vector<double>& b) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) y[i] = b[piv_[i]];
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < i; ++j) y[i] -= lu_[i * n_ + j] * y[j];
    }
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < n_; ++j) y[i] -= lu_[i * n_ + j] * y[j];
      y[i] /= lu_[i * n_ + i];
    }
    b = std::move(y);
  }

  std::vector<double> a_;
  std::vector<double> lu_;
  int n_;
  std::vector<int> piv_;
  bool singular_ = false;
};

struct ScaledStencil {
  std::vector<double> u;  // (x - center) / scale
  double scale;
};

ScaledStencil shift_and_scale(std::span<const double> xs, double center) {
  ScaledStencil s;
  s.u.resize(xs.size());
  double h = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s.u[i] = xs[i] - center;
    h = std::max(h, std::abs(s.u[i]));
  }
  if (h == 0.0) {
    throw DegenerateStencilError("all stencil abscissae coincide with the fit center");
  }
  s.scale = h;
  for (auto& v : s.u) v /= h;
  return s;
}

void check_inputs(std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> weights, double center,
                  bool require_weights) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw InvalidInputError("fit needs matching, non-empty xs and ys");
  }
  if (!std::isfinite(center)) {
    throw InvalidInputError("fit center is not finite");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw InvalidInputError("fit input " + std::to_string(i) + " is not finite");
    }
  }
  if (require_weights) {
    if (weights.size() != xs.size()) {
      throw InvalidInputError("fit weights length differs from data length");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!std::isfinite(weights[i]) || !(weights[i] > 0.0)) {
        throw InvalidInputError("fit weight " + std::to_string(i) + " must be finite and > 0");
      }
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i] == xs[j]) {
        throw DegenerateStencilError("duplicate abscissa at stencil entries " +
                                     std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
}

// Undo the internal scale so the coefficients act on (x - center).
FitResult unscale(std::vector<double> scaled_coeffs, double scale, double center) {
  double inv_pow = 1.0;
  for (auto& c : scaled_coeffs) {
    c *= inv_pow;
    inv_pow /= scale;
  }
  for (const double c : scaled_coeffs) {
    if (!std::isfinite(c)) {
      throw IllConditionedError("fit produced non-finite coefficients",
                                std::numeric_limits<double>::infinity());
    }
  }
  return FitResult{std::move(scaled_coeffs), center};
}

}  // namespace

void FitPolicy::validate() const {
  if (basis_count < 2) {
    throw InvalidInputError("FitPolicy.basis_count must be >= 2");
  }
  if (interior_half_width < 1) {
    throw InvalidInputError("FitPolicy.interior_half_width must be >= 1");
  }
  const int window = 2 * interior_half_width + 1;
  if (estimator == Estimator::ExactPolynomial && window != basis_count) {
    throw InvalidInputError(
        "ExactPolynomial requires an interior window of exactly basis_count points "
        "(2s+1 == m); got window " + std::to_string(window) + " for m = " +
        std::to_string(basis_count));
  }
  if (estimator == Estimator::LeastSquares && window < basis_count) {
    throw InvalidInputError("LeastSquares requires an interior window of at least "
                            "basis_count points (2s+1 >= m)");
  }
  if (boundary_degree < 0 || boundary_degree > basis_count - 1) {
    throw InvalidInputError("FitPolicy.boundary_degree must lie in [0, basis_count - 1]");
  }
  if (boundary_extension < 0) {
    throw InvalidInputError("FitPolicy.boundary_extension must be >= 0");
  }
  if (weight_kernel.kind == WeightKernel::Kind::Gaussian &&
      !(weight_kernel.bandwidth > 0.0)) {
    throw InvalidInputError("Gaussian weight kernel needs a positive bandwidth");
  }
}

Stencil select_stencil(int center_index, int grid_size, const FitPolicy& policy) {
  policy.validate();
  if (center_index < 0 || center_index >= grid_size) {
    throw InvalidInputError("stencil center index " + std::to_string(center_index) +
                            " outside grid of size " + std::to_string(grid_size));
  }
  const int s = policy.interior_half_width;
  if (center_index - s >= 0 && center_index + s <= grid_size - 1) {
    return Stencil{center_index - s, center_index + s, policy.basis_count - 1};
  }
  const int window = 2 * s + 1 + policy.boundary_extension;
  if (window > grid_size) {
    throw GridTooSmallError("grid of " + std::to_string(grid_size) +
                            " points cannot host the boundary window of " +
                            std::to_string(window) + " points");
  }
  if (center_index - s < 0) {
    return Stencil{0, window - 1, policy.boundary_degree};
  }
  return Stencil{grid_size - window, grid_size - 1, policy.boundary_degree};
}

namespace detail {

FitResult interpolating_fit(std::span<const double> xs, std::span<const double> ys,
                            double center) {
  check_inputs(xs, ys, {}, center, false);
  const int m = static_cast<int>(xs.size());
  const ScaledStencil st = shift_and_scale(xs, center);

  std::vector<double> vand(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    double pw = 1.0;
    for (int j = 0; j < m; ++j) {
      vand[i * m + j] = pw;
      pw *= st.u[i];
    }
  }
  SquareSolver solver(std::move(vand), m);
  const double cond = solver.condition_estimate();
  if (!(cond < kConditionLimit)) {
    throw IllConditionedError(
        "interpolation system condition estimate " + std::to_string(cond) +
            " exceeds limit; stencil abscissae are nearly coincident",
        cond);
  }
  return unscale(solver.solve(ys), st.scale, center);
}

FitResult least_squares_fit(std::span<const double> xs, std::span<const double> ys,
                            int degree, std::span<const double> weights, double center) {
  check_inputs(xs, ys, weights, center, true);
  if (degree < 0) {
    throw InvalidInputError("fit degree must be >= 0");
  }
  const std::size_t n = xs.size();
  const int m = degree + 1;
  if (n < static_cast<std::size_t>(m)) {
    throw InvalidInputError("least squares fit needs at least degree + 1 points");
  }
  const ScaledStencil st = shift_and_scale(xs, center);

  std::vector<double> moments(static_cast<std::size_t>(2 * degree) + 1);
  kernels::weighted_power_moments(st.u.data(), weights.data(), n,
                                  static_cast<std::size_t>(2 * degree), moments.data());
  std::vector<double> rhs(static_cast<std::size_t>(m));
  kernels::weighted_moment_rhs(st.u.data(), ys.data(), weights.data(), n,
                               static_cast<std::size_t>(degree), rhs.data());

  std::vector<double> gram(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) gram[j * m + k] = moments[j + k];
  }
  SquareSolver solver(std::move(gram), m);
  const double cond = solver.condition_estimate();
  if (!(cond < kConditionLimit)) {
    throw IllConditionedError(
        "normal equations condition estimate " + std::to_string(cond) +
            " exceeds limit; stencil abscissae are nearly degenerate",
        cond);
  }
  return unscale(solver.solve(rhs), st.scale, center);
}

}  // namespace detail

FitResult fit(std::span<const double> xs, std::span<const double> ys, int degree,
              std::span<const double> weights, double center) {
  if (degree < 0) {
    throw InvalidInputError("fit degree must be >= 0");
  }
  if (xs.size() == static_cast<std::size_t>(degree) + 1) {
    // Interpolation: the residuals are identically zero and the weights drop
    // out, so solve the square system directly.
    check_inputs(xs, ys, weights, center, !weights.empty());
    return detail::interpolating_fit(xs, ys, center);
  }
  return detail::least_squares_fit(xs, ys, degree, weights, center);
}

double eval_fit(const FitResult& f, double x, int derivative_order) {
  if (derivative_order < 0) {
    throw InvalidInputError("derivative order must be >= 0");
  }
  const int m = static_cast<int>(f.coefficients.size());
  const int k = derivative_order;
  if (k >= m) return 0.0;
  const double u = x - f.center;
  // Horner on the term-wise differentiated coefficients
  // a_j * j! / (j-k)! for j = k..m-1.
  double acc = 0.0;
  for (int j = m - 1; j >= k; --j) {
    double fall = 1.0;
    for (int r = 0; r < k; ++r) fall *= static_cast<double>(j - r);
    acc = acc * u + f.coefficients[j] * fall;
  }
  return acc;
}

std::vector<double> derivative_coefficients(const FitResult& f) {
  if (f.coefficients.size() <= 1) return {0.0};
  std::vector<double> d(f.coefficients.size() - 1);
  for (std::size_t j = 1; j < f.coefficients.size(); ++j) {
    d[j - 1] = f.coefficients[j] * static_cast<double>(j);
  }
  return d;
}

FitResult fit_at_point(std::span<const double> grid_xs, std::span<const double> grid_ys,
                       int center_index, const FitPolicy& policy) {
  if (grid_xs.size() != grid_ys.size()) {
    throw InvalidInputError("grid xs/ys lengths differ");
  }
  const Stencil st = select_stencil(center_index, static_cast<int>(grid_xs.size()), policy);
  const double center = grid_xs[center_index];
  const std::size_t count = static_cast<std::size_t>(st.size());
  auto xs = grid_xs.subspan(static_cast<std::size_t>(st.first), count);
  auto ys = grid_ys.subspan(static_cast<std::size_t>(st.first), count);

  std::vector<double> w(count, 1.0);
  if (policy.weight_kernel.kind == WeightKernel::Kind::Gaussian) {
    const double b2 = 2.0 * policy.weight_kernel.bandwidth * policy.weight_kernel.bandwidth;
    for (std::size_t i = 0; i < count; ++i) {
      const double d = xs[i] - center;
      w[i] = std::exp(-d * d / b2);
    }
  }
  try {
    return fit(xs, ys, st.effective_degree, w, center);
  } catch (const IllConditionedError& e) {
    throw IllConditionedError(std::string(e.what()) + " (fit centered at grid index " +
                                  std::to_string(center_index) + ")",
                              e.condition_estimate);
  } catch (const DegenerateStencilError& e) {
    throw DegenerateStencilError(std::string(e.what()) + " (fit centered at grid index " +
                                 std::to_string(center_index) + ")");
  }
}

}  // namespace bohm
