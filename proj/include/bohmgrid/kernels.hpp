#pragma once

// Data-parallel inner-loop kernels.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active backend is picked once at runtime from CPU capabilities;
// tests can force a backend to check scalar/vector equivalence. Element-wise
// kernels (scaled_add, poly_eval_many) are bit-identical across backends; the
// reductions (dot, moments, min_adjacent_gap) may differ by accumulation order
// within ~1 ulp per element.

#include <cstddef>

namespace bohm::kernels {

enum class Backend { Scalar, Avx2 };

// Backend chosen for this process (CPU detection, or a forced override).
Backend active_backend();
const char* backend_name(Backend backend);
bool backend_available(Backend backend);
// Test hook: pin the dispatch to one backend. Throws InvalidInputError if the
// backend is not available on this machine.
void force_backend(Backend backend);
void reset_backend();

// y[i] += a * x[i]
void scaled_add(double a, const double* x, double* y, std::size_t n);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// out[i] = c[0] + c[1]*xs[i] + ... + c[ncoeff-1]*xs[i]^(ncoeff-1), by Horner.
void poly_eval_many(const double* coeffs, std::size_t ncoeff,
                    const double* xs, std::size_t n, double* out);

// moments[p] = sum_i w[i] * x[i]^p for p = 0..max_pow. This is the Gram fill
// for a weighted monomial fit: the normal matrix is moments[j+k].
void weighted_power_moments(const double* x, const double* w, std::size_t n,
                            std::size_t max_pow, double* moments);

// rhs[p] = sum_i w[i] * y[i] * x[i]^p for p = 0..max_pow.
void weighted_moment_rhs(const double* x, const double* y, const double* w,
                         std::size_t n, std::size_t max_pow, double* rhs);

// Smallest q[i+1] - q[i] and the first index attaining it. Requires n >= 2.
struct MinGap {
  double gap;
  std::size_t index;
};
MinGap min_adjacent_gap(const double* q, std::size_t n);

// Reference implementations, always available. The dispatched entry points
// above are equivalence-tested against these.
namespace scalar {
void scaled_add(double a, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void poly_eval_many(const double* coeffs, std::size_t ncoeff,
                    const double* xs, std::size_t n, double* out);
void weighted_power_moments(const double* x, const double* w, std::size_t n,
                            std::size_t max_pow, double* moments);
void weighted_moment_rhs(const double* x, const double* y, const double* w,
                         std::size_t n, std::size_t max_pow, double* rhs);
MinGap min_adjacent_gap(const double* q, std::size_t n);
}  // namespace scalar

#if defined(BOHM_HAVE_AVX2)
namespace avx2 {
bool supported();
void scaled_add(double a, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void poly_eval_many(const double* coeffs, std::size_t ncoeff,
                    const double* xs, std::size_t n, double* out);
void weighted_power_moments(const double* x, const double* w, std::size_t n,
                            std::size_t max_pow, double* moments);
void weighted_moment_rhs(const double* x, const double* y, const double* w,
                         std::size_t n, std::size_t max_pow, double* rhs);
MinGap min_adjacent_gap(const double* q, std::size_t n);
}  // namespace avx2
#endif

}  // namespace bohm::kernels
