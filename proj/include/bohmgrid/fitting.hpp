#pragma once

// Local polynomial regression over grid stencils.
//
// Both derivative estimators the integrator compares live here:
//   - exact polynomial fitting: the stencil has exactly degree+1 points and
//     the polynomial interpolates every one of them;
//   - weighted least squares: the stencil is wider than degree+1 and the
//     coefficients minimize sum_i w_i * (p(x_i) - y_i)^2.
// With stencil size equal to degree+1 the two produce the same polynomial.
//
// All fits are computed in the shifted variable (x - center) and internally
// rescaled for conditioning; the returned coefficients are in (x - center).

#include <span>
#include <vector>

namespace bohm {

enum class Estimator { ExactPolynomial, LeastSquares };

struct WeightKernel {
  enum class Kind { Uniform, Gaussian };
  Kind kind = Kind::Uniform;
  double bandwidth = 1.0;  // Gaussian only

  static WeightKernel uniform() { return {Kind::Uniform, 1.0}; }
  static WeightKernel gaussian(double bandwidth) { return {Kind::Gaussian, bandwidth}; }
};

// Stencil sizes and degrees for one fitted field.
//
// Interior points get a centered window of 2*interior_half_width + 1 points
// fitted at degree basis_count - 1. Near the edges the window is pinned to
// the edge, widened by boundary_extension extra points, and the degree drops
// to boundary_degree: a deliberately strong least-squares fit that eases the
// missing-information problem at the grid boundary.
struct FitPolicy {
  Estimator estimator = Estimator::ExactPolynomial;
  int basis_count = 7;             // m; polynomial degree is m - 1
  int interior_half_width = 3;     // s; interior stencil has 2s+1 points
  int boundary_degree = 2;
  int boundary_extension = 7;      // extra points appended to an edge window
  WeightKernel weight_kernel = WeightKernel::uniform();

  // Throws InvalidInputError when a field combination is inconsistent
  // (ExactPolynomial requires 2s+1 == m, LeastSquares 2s+1 >= m, ...).
  void validate() const;
};

// Coefficients a_1..a_m of p(x) = sum_j a_j (x - center)^(j-1).
struct FitResult {
  std::vector<double> coefficients;
  double center = 0.0;
};

// Contiguous index window [first, last] fitted at effective_degree.
struct Stencil {
  int first = 0;
  int last = 0;
  int effective_degree = 0;

  int size() const { return last - first + 1; }
};

// Window selection for the fit centered at grid index center_index.
// Throws GridTooSmallError when the grid cannot host the boundary window.
Stencil select_stencil(int center_index, int grid_size, const FitPolicy& policy);

// Weighted polynomial fit of degree `degree` through (xs, ys) in the shifted
// variable (x - center). With xs.size() == degree + 1 this interpolates (the
// residuals vanish and the weights are immaterial); with more points it
// solves the weighted normal equations.
FitResult fit(std::span<const double> xs, std::span<const double> ys, int degree,
              std::span<const double> weights, double center);

// k-th derivative of the fitted polynomial at x (k = 0 is the value itself;
// orders beyond the degree are 0).
double eval_fit(const FitResult& f, double x, int derivative_order);

// Coefficients of d/dx p in the same shifted basis.
std::vector<double> derivative_coefficients(const FitResult& f);

// Policy-driven fit at one grid point: stencil selection, weight evaluation,
// then fit() with center = grid_xs[center_index].
FitResult fit_at_point(std::span<const double> grid_xs, std::span<const double> grid_ys,
                       int center_index, const FitPolicy& policy);

namespace detail {

// The two algebraic routes behind fit(), kept separately callable so their
// n == degree+1 agreement stays an observable property.
FitResult interpolating_fit(std::span<const double> xs, std::span<const double> ys,
                            double center);
FitResult least_squares_fit(std::span<const double> xs, std::span<const double> ys,
                            int degree, std::span<const double> weights, double center);

}  // namespace detail

}  // namespace bohm
