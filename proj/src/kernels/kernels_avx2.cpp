// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "tomolab/kernels.hpp"

namespace tomolab::kernels {

namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_contiguous(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4), acc1);
  }
  for (; j + 4 <= n; j += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
  }
  double total = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) total += a[j] * b[j];
  return total;
}

void dot_rows_avx2(const double* rows, std::size_t n, std::size_t d, const double* v, double* out) {
  if (d == 1) {
    const __m256d s = _mm256_set1_pd(v[0]);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(rows + i), s));
    for (; i < n; ++i) out[i] = rows[i] * v[0];
    return;
  }
  if (d == 4) {
    const __m256d vv = _mm256_loadu_pd(v);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = horizontal_sum(_mm256_mul_pd(_mm256_loadu_pd(rows + 4 * i), vv));
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_contiguous(rows + i * d, v, d);
}

double multiply_sum_avx2(double* w, const double* l, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(l + i));
    _mm256_storeu_pd(w + i, prod);
    acc = _mm256_add_pd(acc, prod);
  }
  double total = horizontal_sum(acc);
  for (; i < n; ++i) {
    w[i] *= l[i];
    total += w[i];
  }
  return total;
}

void scale_avx2(double* x, std::size_t n, double s) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), sv));
  for (; i < n; ++i) x[i] *= s;
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_contiguous(x, x, n); }

void weighted_row_sum_avx2(const double* rows, std::size_t n, std::size_t d, const double* w,
                           double* out) {
  if (d == 1) {
    out[0] = dot_contiguous(rows, w, n);
    return;
  }
  for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
  const std::size_t wide = d - d % 4;
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows + i * d;
    const __m256d wi = _mm256_set1_pd(w[i]);
    for (std::size_t j = 0; j < wide; j += 4) {
      _mm256_storeu_pd(out + j, _mm256_fmadd_pd(wi, _mm256_loadu_pd(r + j), _mm256_loadu_pd(out + j)));
    }
    for (std::size_t j = wide; j < d; ++j) out[j] += w[i] * r[j];
  }
}

}  // namespace

const KernelTable* avx2_table_unchecked() {
  static const KernelTable table{"avx2",     dot_rows_avx2,    multiply_sum_avx2,
                                 scale_avx2, sum_squares_avx2, weighted_row_sum_avx2};
  return &table;
}

}  // namespace tomolab::kernels
