#include <cstdlib>
#include <string_view>

#include "gradsense/log.hpp"
#include "kernels_impl.hpp"

namespace gradsense::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(GRADSENSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const KernelTable* simd = avx2_kernels();
  if (const char* forced = std::getenv("GRADSENSE_KERNELS")) {
    const std::string_view name(forced);
    if (name == "scalar") return scalar_kernels();
    if (name == "avx2") {
      if (simd) return *simd;
      log_warning("GRADSENSE_KERNELS=avx2 requested but AVX2 is unavailable; using scalar kernels");
      return scalar_kernels();
    }
    log_warning("unknown GRADSENSE_KERNELS value, ignoring");
  }
  return simd ? *simd : scalar_kernels();
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(GRADSENSE_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace gradsense::kernels
