#include "bohmgrid/kernels.hpp"

#include <atomic>

#include "bohmgrid/errors.hpp"

namespace bohm::kernels {

namespace {

Backend detect() {
#if defined(BOHM_HAVE_AVX2)
  if (avx2::supported()) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

std::atomic<int> g_forced{-1};

}  // namespace

Backend active_backend() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Backend>(forced);
  static const Backend detected = detect();
  return detected;
}

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(BOHM_HAVE_AVX2)
      return avx2::supported();
#else
      return false;
#endif
  }
  return false;
}

void force_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw InvalidInputError(std::string("kernel backend not available: ") +
                            backend_name(backend));
  }
  g_forced.store(static_cast<int>(backend), std::memory_order_relaxed);
}

void reset_backend() { g_forced.store(-1, std::memory_order_relaxed); }

#if defined(BOHM_HAVE_AVX2)
#define BOHM_DISPATCH(call_scalar, call_avx2) \
  ((active_backend() == Backend::Avx2) ? (call_avx2) : (call_scalar))
#else
#define BOHM_DISPATCH(call_scalar, call_avx2) (call_scalar)
#endif

void scaled_add(double a, const double* x, double* y, std::size_t n) {
  BOHM_DISPATCH(scalar::scaled_add(a, x, y, n), avx2::scaled_add(a, x, y, n));
}

double dot(const double* a, const double* b, std::size_t n) {
  return BOHM_DISPATCH(scalar::dot(a, b, n), avx2::dot(a, b, n));
}

void poly_eval_many(const double* coeffs, std::size_t ncoeff,
                    const double* xs, std::size_t n, double* out) {
  BOHM_DISPATCH(scalar::poly_eval_many(coeffs, ncoeff, xs, n, out),
                avx2::poly_eval_many(coeffs, ncoeff, xs, n, out));
}

void weighted_power_moments(const double* x, const double* w, std::size_t n,
                            std::size_t max_pow, double* moments) {
  BOHM_DISPATCH(scalar::weighted_power_moments(x, w, n, max_pow, moments),
                avx2::weighted_power_moments(x, w, n, max_pow, moments));
}

void weighted_moment_rhs(const double* x, const double* y, const double* w,
                         std::size_t n, std::size_t max_pow, double* rhs) {
  BOHM_DISPATCH(scalar::weighted_moment_rhs(x, y, w, n, max_pow, rhs),
                avx2::weighted_moment_rhs(x, y, w, n, max_pow, rhs));
}

MinGap min_adjacent_gap(const double* q, std::size_t n) {
  return BOHM_DISPATCH(scalar::min_adjacent_gap(q, n),
                       avx2::min_adjacent_gap(q, n));
}

#undef BOHM_DISPATCH

}  // namespace bohm::kernels
