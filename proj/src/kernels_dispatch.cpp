#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "pecnet/kernels.hpp"

namespace pecnet::kern {
namespace {

Isa pick_isa() {
  if (const char* env = std::getenv("PECNET_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (avx2_available()) return Isa::avx2;
      std::fprintf(stderr,
                   "pecnet: PECNET_KERNELS=avx2 but cpu lacks avx2+fma, "
                   "falling back to scalar\n");
      return Isa::scalar;
    }
    if (std::strcmp(env, "auto") != 0) {
      std::fprintf(stderr, "pecnet: unknown PECNET_KERNELS value '%s', using auto\n",
                   env);
    }
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

Isa& current() {
  static Isa isa = pick_isa();
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
#if defined(PECNET_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current(); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available())
    throw std::runtime_error("avx2 kernels unavailable on this machine");
  current() = isa;
}

template <>
const Ops<float>& ops<float>() {
#if defined(PECNET_HAVE_AVX2_TU)
  if (current() == Isa::avx2) return detail::avx2_ops_f32();
#endif
  return detail::scalar_ops_f32();
}

template <>
const Ops<double>& ops<double>() {
#if defined(PECNET_HAVE_AVX2_TU)
  if (current() == Isa::avx2) return detail::avx2_ops_f64();
#endif
  return detail::scalar_ops_f64();
}

}  // namespace pecnet::kern
