#pragma once

#include <cstddef>

// Arithmetic inner loops behind everything upstream: one scalar reference
// implementation plus an AVX2 variant, selected once at startup (cpuid, or
// the PECNET_KERNELS env var: "scalar" | "avx2" | "auto").
//
// Elementwise kernels and the Adam update are written so scalar and AVX2
// produce bit-identical results (same per-element operation order, no FMA
// contraction). Matmul and reduction kernels reassociate and are only
// equivalent up to rounding; tests pin the tolerance.

namespace pecnet::kern {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool avx2_available();
Isa active_isa();
// Test hook. Selecting Isa::avx2 on a machine without AVX2 throws.
void set_isa(Isa isa);

template <typename T>
struct Ops {
  // y[i] = max(x[i], 0); subgradient at 0 is 0 (relu_grad uses x > 0).
  void (*relu)(const T* x, T* y, std::size_t n);
  // gx[i] += (x[i] > 0) ? gy[i] : 0
  void (*relu_grad)(const T* x, const T* gy, T* gx, std::size_t n);
  void (*add)(const T* a, const T* b, T* y, std::size_t n);
  void (*sub)(const T* a, const T* b, T* y, std::size_t n);
  void (*mul)(const T* a, const T* b, T* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(T a, const T* x, T* y, std::size_t n);
  // y[i] = a * x[i] + b
  void (*scale_shift)(const T* x, T a, T b, T* y, std::size_t n);
  T (*sum)(const T* x, std::size_t n);
  T (*dot)(const T* a, const T* b, std::size_t n);
  // Row-major. C[m x n] = A[m x k] * B[k x n]; accumulates into C when acc.
  void (*matmul)(const T* A, const T* B, T* C, std::size_t m, std::size_t k,
                 std::size_t n, bool acc);
  // C[m x n] = A[m x k] * B[n x k]^T
  void (*matmul_nt)(const T* A, const T* B, T* C, std::size_t m, std::size_t k,
                    std::size_t n, bool acc);
  // C[m x n] = A[k x m]^T * B[k x n]
  void (*matmul_tn)(const T* A, const T* B, T* C, std::size_t m, std::size_t k,
                    std::size_t n, bool acc);
  // Adam with bias correction; bias1 = 1 - beta1^t, bias2 = 1 - beta2^t.
  void (*adam_step)(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1,
                    T beta2, T eps, T bias1, T bias2);
};

// Active kernel table for T in {float, double}.
template <typename T>
const Ops<T>& ops();

namespace detail {
const Ops<float>& scalar_ops_f32();
const Ops<double>& scalar_ops_f64();
#if defined(PECNET_HAVE_AVX2_TU)
const Ops<float>& avx2_ops_f32();
const Ops<double>& avx2_ops_f64();
#endif
}  // namespace detail

}  // namespace pecnet::kern
