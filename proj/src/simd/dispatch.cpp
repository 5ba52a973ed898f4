#include <atomic>
#include <cassert>

#include "xicorr/error.hpp"
#include "xicorr/simd.hpp"

namespace xicorr::simd {
namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  std::int64_t (*gathered_abs_step_sum)(const std::int32_t*, const std::int32_t*,
                                        std::size_t) noexcept;
};

constexpr KernelTable kScalar{Isa::scalar, &scalar::dot, &scalar::gathered_abs_step_sum};
#if defined(XICORR_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::dot, &avx2::gathered_abs_step_sum};
#endif

bool cpu_has_avx2() noexcept {
#if defined(XICORR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return &kScalar;
    case Isa::avx2:
#if defined(XICORR_HAVE_AVX2)
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{table_for(detected_isa())};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

Isa detected_isa() noexcept { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

bool isa_available(Isa isa) noexcept { return table_for(isa) != nullptr; }

Isa active_isa() noexcept { return active_table().load(std::memory_order_relaxed)->isa; }

void set_active_isa(Isa isa) {
  const KernelTable* table = table_for(isa);
  if (table == nullptr)
    throw Error(ErrorCode::InvalidArgument,
                "instruction set " + std::string(to_string(isa)) + " is not available");
  active_table().store(table, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_table().load(std::memory_order_relaxed)->dot(a.data(), b.data(), a.size());
}

std::int64_t gathered_abs_step_sum(std::span<const std::int32_t> values,
                                   std::span<const std::int32_t> order) {
  assert(values.size() == order.size());
  return active_table().load(std::memory_order_relaxed)
      ->gathered_abs_step_sum(values.data(), order.data(), order.size());
}

}  // namespace xicorr::simd
