#include "cnsdist/kernels.hpp"

#if defined(CNSDIST_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#define CNSDIST_AVX2 __attribute__((target("avx2,popcnt")))

namespace cnsdist::kernels::avx2 {

CNSDIST_AVX2 void bernoulli_step(double* coeffs, std::size_t len, double p) {
  const double q = 1.0 - p;
  const __m256d vp = _mm256_set1_pd(p);
  const __m256d vq = _mm256_set1_pd(q);

  coeffs[len] = p * coeffs[len - 1];
  // Blocks of four, highest first. Block [w, w+4) reads old [w-1, w+3); the
  // next block down only reads below w, so in-place update is safe.
  std::size_t w = len;
  while (w >= 5) {
    w -= 4;
    const __m256d cur = _mm256_loadu_pd(coeffs + w);
    const __m256d prev = _mm256_loadu_pd(coeffs + w - 1);
    const __m256d keep = _mm256_mul_pd(vq, cur);
    const __m256d shift = _mm256_mul_pd(vp, prev);
    _mm256_storeu_pd(coeffs + w, _mm256_add_pd(keep, shift));
  }
  for (std::size_t k = w - 1; k > 0; --k) {
    const double keep = q * coeffs[k];
    const double shift = p * coeffs[k - 1];
    coeffs[k] = keep + shift;
  }
  coeffs[0] = q * coeffs[0];
}

CNSDIST_AVX2 void axpy(double* y, const double* x, std::size_t len, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d t0 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d t1 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t0));
    _mm256_storeu_pd(y + i + 4, _mm256_add_pd(_mm256_loadu_pd(y + i + 4), t1));
  }
  for (; i + 4 <= len; i += 4) {
    const __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
  }
  for (; i < len; ++i) {
    const double t = a * x[i];
    y[i] = y[i] + t;
  }
}

// All-pairs block compare: 8 lanes of a against the 8 rotations of b.
CNSDIST_AVX2 std::size_t intersect_count(const std::uint32_t* a, std::size_t na,
                                         const std::uint32_t* b, std::size_t nb) {
  std::size_t i = 0, j = 0, count = 0;
  const __m256i rot = _mm256_setr_epi32(1, 2, 3, 4, 5, 6, 7, 0);
  while (i + 8 <= na && j + 8 <= nb) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + j));
    __m256i hits = _mm256_cmpeq_epi32(va, vb);
    for (int r = 1; r < 8; ++r) {
      vb = _mm256_permutevar8x32_epi32(vb, rot);
      hits = _mm256_or_si256(hits, _mm256_cmpeq_epi32(va, vb));
    }
    count += static_cast<std::size_t>(
        _mm_popcnt_u32(static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(hits)))));
    const std::uint32_t amax = a[i + 7];
    const std::uint32_t bmax = b[j + 7];
    if (amax <= bmax) i += 8;
    if (bmax <= amax) j += 8;
  }
  return count + scalar::intersect_count(a + i, na - i, b + j, nb - j);
}

}  // namespace cnsdist::kernels::avx2

#endif
