#include "qgt/kernels.hpp"

#include <stdexcept>
#include <string>

namespace qgt::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

Isa parse_isa(std::string_view name) {
  if (name == "auto") return best_isa();
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw std::invalid_argument("unknown kernel variant '" + std::string(name) + "' (expected auto, scalar or avx2)");
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(QGT_HAVE_AVX2_KERNEL) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() {
  static const Isa best = isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  return best;
}

MetricKernel metric_kernel(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) + "' is not available on this CPU/build");
  switch (isa) {
    case Isa::scalar: return &metric_sums_scalar;
    case Isa::avx2:
#if defined(QGT_HAVE_AVX2_KERNEL)
      return &metric_sums_avx2;
#else
      break;
#endif
  }
  return &metric_sums_scalar;
}

}  // namespace qgt::simd
