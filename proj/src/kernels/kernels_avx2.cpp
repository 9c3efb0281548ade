// AVX2 kernel variants. This translation unit is the only one compiled with
// -mavx2 (and without -mfma: the element-wise kernels must keep the scalar
// mul/add rounding so results stay bit-identical to the reference).

#include "bohmgrid/kernels.hpp"

#if defined(BOHM_HAVE_AVX2)

#include <immintrin.h>

namespace bohm::kernels::avx2 {

namespace {

// Fixed-order horizontal sum: lane0 + lane1 + lane2 + lane3.
inline double hsum_ordered(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

// Moment loops above this power fall back to the scalar kernel; the register
// budget is sized for the polynomial degrees this project actually fits.
constexpr std::size_t kMaxVectorPow = 16;

}  // namespace

bool supported() {
#if defined(__GNUC__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

void scaled_add(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
  }
  for (; i < n; ++i) {
    y[i] += a * x[i];
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_loadu_pd(a + i);
    const __m256d bv = _mm256_loadu_pd(b + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(av, bv));
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    tail += a[i] * b[i];
  }
  return hsum_ordered(acc) + tail;
}

void poly_eval_many(const double* coeffs, std::size_t ncoeff,
                    const double* xs, std::size_t n, double* out) {
  if (ncoeff == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(xs + i);
    __m256d acc = _mm256_set1_pd(coeffs[ncoeff - 1]);
    for (std::size_t k = ncoeff - 1; k-- > 0;) {
      acc = _mm256_add_pd(_mm256_mul_pd(acc, xv), _mm256_set1_pd(coeffs[k]));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
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
  if (max_pow > kMaxVectorPow) {
    scalar::weighted_power_moments(x, w, n, max_pow, moments);
    return;
  }
  __m256d acc[kMaxVectorPow + 1];
  for (std::size_t p = 0; p <= max_pow; ++p) acc[p] = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    __m256d pw = _mm256_loadu_pd(w + i);
    for (std::size_t p = 0; p <= max_pow; ++p) {
      acc[p] = _mm256_add_pd(acc[p], pw);
      pw = _mm256_mul_pd(pw, xv);
    }
  }
  for (std::size_t p = 0; p <= max_pow; ++p) moments[p] = hsum_ordered(acc[p]);
  for (; i < n; ++i) {
    double pw = w[i];
    for (std::size_t p = 0; p <= max_pow; ++p) {
      moments[p] += pw;
      pw *= x[i];
    }
  }
}

void weighted_moment_rhs(const double* x, const double* y, const double* w,
                         std::size_t n, std::size_t max_pow, double* rhs) {
  if (max_pow > kMaxVectorPow) {
    scalar::weighted_moment_rhs(x, y, w, n, max_pow, rhs);
    return;
  }
  __m256d acc[kMaxVectorPow + 1];
  for (std::size_t p = 0; p <= max_pow; ++p) acc[p] = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    __m256d pw = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(y + i));
    for (std::size_t p = 0; p <= max_pow; ++p) {
      acc[p] = _mm256_add_pd(acc[p], pw);
      pw = _mm256_mul_pd(pw, xv);
    }
  }
  for (std::size_t p = 0; p <= max_pow; ++p) rhs[p] = hsum_ordered(acc[p]);
  for (; i < n; ++i) {
    double pw = w[i] * y[i];
    for (std::size_t p = 0; p <= max_pow; ++p) {
      rhs[p] += pw;
      pw *= x[i];
    }
  }
}

MinGap min_adjacent_gap(const double* q, std::size_t n) {
  double best = q[1] - q[0];
  std::size_t i = 0;
  if (n >= 6) {
    __m256d vbest = _mm256_set1_pd(best);
    for (; i + 5 <= n; i += 4) {
      const __m256d lo = _mm256_loadu_pd(q + i);
      const __m256d hi = _mm256_loadu_pd(q + i + 1);
      vbest = _mm256_min_pd(vbest, _mm256_sub_pd(hi, lo));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, vbest);
    for (double v : lane) {
      if (v < best) best = v;
    }
  }
  for (; i + 1 < n; ++i) {
    const double gap = q[i + 1] - q[i];
    if (gap < best) best = gap;
  }
  // min over doubles is order-independent, so rescanning for the first index
  // attaining it reproduces the scalar tie-break exactly.
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (q[j + 1] - q[j] == best) return MinGap{best, j};
  }
  return MinGap{best, 0};
}

}  // namespace bohm::kernels::avx2

#endif  // BOHM_HAVE_AVX2
