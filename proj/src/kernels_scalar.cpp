#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pecnet/kernels.hpp"

// Reference kernels. Every other variant is equivalence-tested against these.

namespace pecnet::kern {
namespace {

template <typename T>
void relu_(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void relu_grad_(const T* x, const T* gy, T* gx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > T(0)) gx[i] += gy[i];
}

template <typename T>
void add_(const T* a, const T* b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

template <typename T>
void sub_(const T* a, const T* b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

template <typename T>
void mul_(const T* a, const T* b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

template <typename T>
void axpy_(T a, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
void scale_shift_(const T* x, T a, T b, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b;
}

template <typename T>
T sum_(const T* x, std::size_t n) {
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

template <typename T>
T dot_(const T* a, const T* b, std::size_t n) {
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
void matmul_(const T* A, const T* B, T* C, std::size_t m, std::size_t k,
             std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    T* c = C + i * n;
    if (!acc) std::fill(c, c + n, T(0));
    const T* a = A + i * k;
    for (std::size_t l = 0; l < k; ++l) {
      const T av = a[l];
      const T* b = B + l * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

template <typename T>
void matmul_nt_(const T* A, const T* B, T* C, std::size_t m, std::size_t k,
                std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* a = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      T s = dot_(a, B + j * k, k);
      T& c = C[i * n + j];
      c = acc ? c + s : s;
    }
  }
}

template <typename T>
void matmul_tn_(const T* A, const T* B, T* C, std::size_t m, std::size_t k,
                std::size_t n, bool acc) {
  if (!acc) std::fill(C, C + m * n, T(0));
  for (std::size_t l = 0; l < k; ++l) {
    const T* a = A + l * m;
    const T* b = B + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const T av = a[i];
      T* c = C + i * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

// Operation order here is the contract: the AVX2 variant mirrors it exactly
// so both ISAs update parameters bit-identically.
template <typename T>
void adam_step_(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1,
                T beta2, T eps, T bias1, T bias2) {
  const T omb1 = T(1) - beta1;
  const T omb2 = T(1) - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + omb1 * g[i];
    v[i] = beta2 * v[i] + (omb2 * g[i]) * g[i];
    const T mhat = m[i] / bias1;
    const T vhat = v[i] / bias2;
    p[i] -= (lr * mhat) / (std::sqrt(vhat) + eps);
  }
}

template <typename T>
constexpr Ops<T> make_table() {
  Ops<T> t{};
  t.relu = relu_<T>;
  t.relu_grad = relu_grad_<T>;
  t.add = add_<T>;
  t.sub = sub_<T>;
  t.mul = mul_<T>;
  t.axpy = axpy_<T>;
  t.scale_shift = scale_shift_<T>;
  t.sum = sum_<T>;
  t.dot = dot_<T>;
  t.matmul = matmul_<T>;
  t.matmul_nt = matmul_nt_<T>;
  t.matmul_tn = matmul_tn_<T>;
  t.adam_step = adam_step_<T>;
  return t;
}

}  // namespace

namespace detail {

const Ops<float>& scalar_ops_f32() {
  static const Ops<float> t = make_table<float>();
  return t;
}

const Ops<double>& scalar_ops_f64() {
  static const Ops<double> t = make_table<double>();
  return t;
}

}  // namespace detail
}  // namespace pecnet::kern
