#include <cstdlib>
#include <string>

#include "tst/error.hpp"
#include "tst/kernels.hpp"

namespace tst::kernels {

#if defined(TST_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernels();
#endif

const KernelTable* avx2_table() {
#if defined(TST_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
  if (supported) return &avx2_kernels();
#endif
  return nullptr;
}

const KernelTable& by_name(std::string_view name) {
  if (name == "scalar") return scalar_table();
  if (name == "avx2") {
    if (const auto* t = avx2_table()) return *t;
    throw Error(ErrorKind::config, "avx2 kernels unavailable on this machine");
  }
  throw Error(ErrorKind::config, "unknown kernel set '" + std::string(name) + "'");
}

const KernelTable& active() {
  static const KernelTable& table = []() -> const KernelTable& {
    if (const char* env = std::getenv("TST_SIMD"); env && *env && std::string_view(env) != "auto")
      return by_name(env);
    if (const auto* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

}  // namespace tst::kernels
