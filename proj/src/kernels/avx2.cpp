// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "boxl0/kernels.hpp"

namespace boxl0::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_sq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

double dist_sq_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

// Elementwise kernels avoid FMA so results match the scalar reference bitwise.
void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void grad_step_avx2(const double* x, const double* g, double step, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(step);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vs, _mm256_loadu_pd(g + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) {
    const double t = step * g[i];
    out[i] = x[i] - t;
  }
}

inline __m256d clamp4(__m256d v, const double* lower, const double* upper, std::size_t i) {
  const __m256d neg_l = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_loadu_pd(lower + i));
  return _mm256_min_pd(_mm256_max_pd(v, neg_l), _mm256_loadu_pd(upper + i));
}

void clamp_box_avx2(const double* z, const double* lower, const double* upper, double* out,
                    std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, clamp4(_mm256_loadu_pd(z + i), lower, upper, i));
  }
  for (; i < n; ++i) {
    double v = z[i];
    if (v >= upper[i]) {
      v = upper[i];
    } else if (v <= -lower[i]) {
      v = -lower[i];
    }
    out[i] = v;
  }
}

void hard_threshold_box_avx2(const double* z, double threshold, const double* lower,
                             const double* upper, double* out, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d thr = _mm256_set1_pd(threshold);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(z + i);
    // Bound hits win over the threshold, which can exceed a bound when a < 1.
    const __m256d up = _mm256_loadu_pd(upper + i);
    const __m256d neg_l = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_loadu_pd(lower + i));
    const __m256d hit = _mm256_or_pd(_mm256_cmp_pd(v, up, _CMP_GE_OQ), _mm256_cmp_pd(v, neg_l, _CMP_LE_OQ));
    const __m256d keep = _mm256_or_pd(hit, _mm256_cmp_pd(_mm256_and_pd(v, abs_mask), thr, _CMP_GE_OQ));
    _mm256_storeu_pd(out + i, clamp4(_mm256_and_pd(v, keep), lower, upper, i));
  }
  for (; i < n; ++i) {
    const double v = z[i];
    if (v >= upper[i]) {
      out[i] = upper[i];
    } else if (v <= -lower[i]) {
      out[i] = -lower[i];
    } else if (std::fabs(v) >= threshold) {
      out[i] = v;
    } else {
      out[i] = 0.0;
    }
  }
}

void soft_threshold_box_avx2(const double* z, double shrink, const double* lower,
                             const double* upper, double* out, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d sign_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL)));
  const __m256d vs = _mm256_set1_pd(shrink);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(z + i);
    const __m256d mag = _mm256_sub_pd(_mm256_and_pd(v, abs_mask), vs);
    const __m256d pos = _mm256_cmp_pd(mag, _mm256_setzero_pd(), _CMP_GT_OQ);
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(v, sign_mask));
    _mm256_storeu_pd(out + i, clamp4(_mm256_and_pd(signed_mag, pos), lower, upper, i));
  }
  for (; i < n; ++i) {
    const double mag = std::fabs(z[i]) - shrink;
    double v = mag > 0.0 ? std::copysign(mag, z[i]) : 0.0;
    if (v >= upper[i]) {
      v = upper[i];
    } else if (v <= -lower[i]) {
      v = -lower[i];
    }
    out[i] = v;
  }
}

constexpr KernelTable kAvx2{
    "avx2",           dot_avx2,          sum_sq_avx2,
    dist_sq_avx2,     axpy_avx2,         grad_step_avx2,
    clamp_box_avx2,   hard_threshold_box_avx2, soft_threshold_box_avx2,
};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kAvx2; }

}  // namespace boxl0::kernels
