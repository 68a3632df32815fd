#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace dyadlab::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(DYADLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* pick_default() noexcept {
  if (const char* env = std::getenv("DYADLAB_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return &detail::kScalarTable;
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return detail::kScalarTable; }

const KernelTable* avx2_kernels() noexcept {
#ifdef DYADLAB_HAVE_AVX2
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

bool select_backend(Backend b) noexcept {
  const KernelTable* t = b == Backend::scalar ? &detail::kScalarTable : avx2_kernels();
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace dyadlab::simd
