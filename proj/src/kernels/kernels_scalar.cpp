// Scalar reference kernels. Deliberately plain loops: these define the
// semantics the vector backends must reproduce.

#include "bohmgrid/kernels.hpp"

namespace bohm::kernels::scalar {

void scaled_add(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

void poly_eval_many(const double* coeffs, std::size_t ncoeff,
                    const double* xs, std::size_t n, double* out) {
  if (ncoeff == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    double acc = coeffs[ncoeff - 1];
    for (std::size_t k = ncoeff - 1; k-- > 0;) {
      acc = acc * x + coeffs[k];
    }
    out[i] = acc;
  }
}

void weighted_power_moments(const double* x, const double* w, std::size_t n,
                            std::size_t max_pow, double* moments) {
  for (std::size_t p = 0; p <= max_pow; ++p) moments[p] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pw = w[i];
    for (std::size_t p = 0; p <= max_pow; ++p) {
      moments[p] += pw;
      pw *= x[i];
    }
  }
}

void weighted_moment_rhs(const double* x, const double* y, const double* w,
                         std::size_t n, std::size_t max_pow, double* rhs) {
  for (std::size_t p = 0; p <= max_pow; ++p) rhs[p] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pw = w[i] * y[i];
    for (std::size_t p = 0; p <= max_pow; ++p) {
      rhs[p] += pw;
      pw *= x[i];
    }
  }
}

MinGap min_adjacent_gap(const double* q, std::size_t n) {
  MinGap best{q[1] - q[0], 0};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double gap = q[i + 1] - q[i];
    if (gap < best.gap) {
      best.gap = gap;
      best.index = i;
    }
  }
  return best;
}

}  // namespace bohm::kernels::scalar
