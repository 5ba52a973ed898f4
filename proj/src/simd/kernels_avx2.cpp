// Compiled with -mavx2; only reached when the CPU reports AVX2.

#include <immintrin.h>

#include <cstdlib>

#include "xicorr/simd.hpp"

namespace xicorr::simd::avx2 {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 16 <= n; k += 16) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4)));
    acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(_mm256_loadu_pd(a + k + 8), _mm256_loadu_pd(b + k + 8)));
    acc3 = _mm256_add_pd(acc3, _mm256_mul_pd(_mm256_loadu_pd(a + k + 12), _mm256_loadu_pd(b + k + 12)));
  }
  for (; k + 4 <= n; k += 4)
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));

  const __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
  const __m128d pair = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

std::int64_t gathered_abs_step_sum(const std::int32_t* values, const std::int32_t* order,
                                   std::size_t n) noexcept {
  if (n < 2) return 0;
  const std::size_t steps = n - 1;
  __m256i acc = _mm256_setzero_si256();  // 4 x int64
  std::size_t k = 0;
  for (; k + 8 <= steps; k += 8) {
    const __m256i lo_idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(order + k));
    const __m256i hi_idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(order + k + 1));
    const __m256i lo = _mm256_i32gather_epi32(values, lo_idx, 4);
    const __m256i hi = _mm256_i32gather_epi32(values, hi_idx, 4);
    const __m256i diff = _mm256_abs_epi32(_mm256_sub_epi32(hi, lo));
    acc = _mm256_add_epi64(acc, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(diff)));
    acc = _mm256_add_epi64(acc, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(diff, 1)));
  }
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::int64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; k < steps; ++k) sum += std::abs(values[order[k + 1]] - values[order[k]]);
  return sum;
}

}  // namespace xicorr::simd::avx2
