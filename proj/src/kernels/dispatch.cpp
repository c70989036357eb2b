#include <cstdlib>
#include <string>

#include "lexdom/error.hpp"
#include "lexdom/kernels.hpp"

namespace lexdom::kernels {

#if defined(LEXDOM_HAVE_AVX2_TU)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(LEXDOM_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& select(std::string_view name) {
  if (name == "scalar") return scalar_kernels();
  if (name == "avx2") {
    if (const auto* t = avx2_kernels()) return *t;
    throw Error("AVX2 kernels are not available on this CPU or build");
  }
  if (name.empty() || name == "auto") {
    if (const auto* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }
  throw Error("unknown kernel set '" + std::string(name) + "'");
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* env = std::getenv("LEXDOM_KERNELS");
    return select(env ? std::string_view(env) : std::string_view("auto"));
  }();
  return table;
}

}  // namespace lexdom::kernels
