#include <cstdlib>

#include "xicorr/simd.hpp"

namespace xicorr::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

std::int64_t gathered_abs_step_sum(const std::int32_t* values, const std::int32_t* order,
                                   std::size_t n) noexcept {
  std::int64_t sum = 0;
  for (std::size_t k = 0; k + 1 < n; ++k)
    sum += std::abs(values[order[k + 1]] - values[order[k]]);
  return sum;
}

}  // namespace xicorr::simd::scalar
