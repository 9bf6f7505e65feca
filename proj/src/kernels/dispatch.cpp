#include <atomic>
#include <cstdlib>
#include <string>

#include "fbl/error.hpp"
#include "fbl/kernels.hpp"

namespace fbl::kernels {

#ifndef FBL_HAVE_AVX2
const KernelTable* avx2_table() noexcept { return nullptr; }
#endif

bool cpu_has_avx2() noexcept {
#if defined(FBL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* select_default() noexcept {
  if (const char* env = std::getenv("FBL_ISA"); env != nullptr && std::string(env) == "scalar")
    return &scalar_table();
  if (cpu_has_avx2() && avx2_table() != nullptr) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> s{select_default()};
  return s;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

void force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    slot().store(&scalar_table(), std::memory_order_release);
    return;
  }
  if (!cpu_has_avx2() || avx2_table() == nullptr)
    throw Error(Errc::invalid_argument, "AVX2 kernels unavailable on this CPU/build");
  slot().store(avx2_table(), std::memory_order_release);
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace fbl::kernels
