#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference
// implementation and, on x86-64, an AVX2 variant; the variant is chosen at
// runtime from CPUID and can be pinned for testing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace xicorr::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Best instruction set supported by both the build and the running CPU.
Isa detected_isa() noexcept;

/// Instruction set used by the dispatched kernels below.
Isa active_isa() noexcept;

/// Pins the dispatched kernels to `isa`. Throws Error(InvalidArgument) when the
/// variant is unavailable. Not synchronized with kernel calls in flight.
void set_active_isa(Isa isa);

bool isa_available(Isa isa) noexcept;

/// sum_k a[k] * b[k]
double dot(std::span<const double> a, std::span<const double> b);

/// sum_{k < n-1} |values[order[k+1]] - values[order[k]]|; order holds 0-based
/// indices into values. This is the numerator of Chatterjee's statistic when
/// order sorts the first sample and values ranks the second.
std::int64_t gathered_abs_step_sum(std::span<const std::int32_t> values,
                                   std::span<const std::int32_t> order);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
std::int64_t gathered_abs_step_sum(const std::int32_t* values, const std::int32_t* order,
                                   std::size_t n) noexcept;
}  // namespace scalar

#if defined(XICORR_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
std::int64_t gathered_abs_step_sum(const std::int32_t* values, const std::int32_t* order,
                                   std::size_t n) noexcept;
}  // namespace avx2
#endif

}  // namespace xicorr::simd
