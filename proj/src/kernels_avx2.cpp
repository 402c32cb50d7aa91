// AVX2 + FMA kernel variants. Built with -mavx2 -mfma; only reachable after
// the dispatcher has confirmed cpu support.
//
// Elementwise kernels (and adam_step) deliberately avoid FMA contraction and
// keep the scalar reference's per-element operation order, so results are
// bit-identical across ISAs. Matmul/sum/dot use wide accumulators + FMA and
// differ from the reference by rounding only.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pecnet/kernels.hpp"

#if defined(PECNET_HAVE_AVX2_TU)

#include <immintrin.h>

namespace pecnet::kern {
namespace {

// ---------------------------------------------------------------------------
// float
// ---------------------------------------------------------------------------

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

void relu_f32(const float* x, float* y, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_grad_f32(const float* x, const float* gy, float* gx, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
    __m256 g = _mm256_and_ps(_mm256_loadu_ps(gy + i), mask);
    _mm256_storeu_ps(gx + i, _mm256_add_ps(_mm256_loadu_ps(gx + i), g));
  }
  for (; i < n; ++i)
    if (x[i] > 0.0f) gx[i] += gy[i];
}

void add_f32(const float* a, const float* b, float* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(
        y + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) y[i] = a[i] + b[i];
}

void sub_f32(const float* a, const float* b, float* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(
        y + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) y[i] = a[i] - b[i];
}

void mul_f32(const float* a, const float* b, float* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(
        y + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) y[i] = a[i] * b[i];
}

void axpy_f32(float a, const float* x, float* y, std::size_t n) {
  const __m256 av = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // mul + add, not FMA: matches the reference rounding
    __m256 t = _mm256_mul_ps(av, _mm256_loadu_ps(x + i));
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), t));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_shift_f32(const float* x, float a, float b, float* y,
                     std::size_t n) {
  const __m256 av = _mm256_set1_ps(a);
  const __m256 bv = _mm256_set1_ps(b);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 t = _mm256_mul_ps(av, _mm256_loadu_ps(x + i));
    _mm256_storeu_ps(y + i, _mm256_add_ps(t, bv));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b;
}

float sum_f32(const float* x, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
  float s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
  float s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matmul_f32(const float* A, const float* B, float* C, std::size_t m,
                std::size_t k, std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    float* c = C + i * n;
    if (!acc) std::fill(c, c + n, 0.0f);
    const float* a = A + i * k;
    std::size_t l = 0;
    // 4-deep k unroll cuts passes over the C row
    for (; l + 4 <= k; l += 4) {
      const __m256 a0 = _mm256_set1_ps(a[l + 0]);
      const __m256 a1 = _mm256_set1_ps(a[l + 1]);
      const __m256 a2 = _mm256_set1_ps(a[l + 2]);
      const __m256 a3 = _mm256_set1_ps(a[l + 3]);
      const float* b0 = B + (l + 0) * n;
      const float* b1 = B + (l + 1) * n;
      const float* b2 = B + (l + 2) * n;
      const float* b3 = B + (l + 3) * n;
      std::size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 cv = _mm256_loadu_ps(c + j);
        cv = _mm256_fmadd_ps(a0, _mm256_loadu_ps(b0 + j), cv);
        cv = _mm256_fmadd_ps(a1, _mm256_loadu_ps(b1 + j), cv);
        cv = _mm256_fmadd_ps(a2, _mm256_loadu_ps(b2 + j), cv);
        cv = _mm256_fmadd_ps(a3, _mm256_loadu_ps(b3 + j), cv);
        _mm256_storeu_ps(c + j, cv);
      }
      for (; j < n; ++j)
        c[j] += a[l] * b0[j] + a[l + 1] * b1[j] + a[l + 2] * b2[j] +
                a[l + 3] * b3[j];
    }
    for (; l < k; ++l) {
      const __m256 av = _mm256_set1_ps(a[l]);
      const float* b = B + l * n;
      std::size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 cv = _mm256_loadu_ps(c + j);
        cv = _mm256_fmadd_ps(av, _mm256_loadu_ps(b + j), cv);
        _mm256_storeu_ps(c + j, cv);
      }
      for (; j < n; ++j) c[j] += a[l] * b[j];
    }
  }
}

void matmul_nt_f32(const float* A, const float* B, float* C, std::size_t m,
                   std::size_t k, std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* a = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      float s = dot_f32(a, B + j * k, k);
      float& c = C[i * n + j];
      c = acc ? c + s : s;
    }
  }
}

void matmul_tn_f32(const float* A, const float* B, float* C, std::size_t m,
                   std::size_t k, std::size_t n, bool acc) {
  if (!acc) std::fill(C, C + m * n, 0.0f);
  for (std::size_t l = 0; l < k; ++l) {
    const float* a = A + l * m;
    const float* b = B + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const __m256 av = _mm256_set1_ps(a[i]);
      float* c = C + i * n;
      std::size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 cv = _mm256_loadu_ps(c + j);
        cv = _mm256_fmadd_ps(av, _mm256_loadu_ps(b + j), cv);
        _mm256_storeu_ps(c + j, cv);
      }
      for (; j < n; ++j) c[j] += a[i] * b[j];
    }
  }
}

void adam_step_f32(float* p, const float* g, float* m, float* v, std::size_t n,
                   float lr, float beta1, float beta2, float eps, float bias1,
                   float bias2) {
  const float omb1 = 1.0f - beta1;
  const float omb2 = 1.0f - beta2;
  const __m256 vb1 = _mm256_set1_ps(beta1);
  const __m256 vb2 = _mm256_set1_ps(beta2);
  const __m256 vomb1 = _mm256_set1_ps(omb1);
  const __m256 vomb2 = _mm256_set1_ps(omb2);
  const __m256 vbias1 = _mm256_set1_ps(bias1);
  const __m256 vbias2 = _mm256_set1_ps(bias2);
  const __m256 vlr = _mm256_set1_ps(lr);
  const __m256 veps = _mm256_set1_ps(eps);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 gv = _mm256_loadu_ps(g + i);
    __m256 mv = _mm256_loadu_ps(m + i);
    __m256 vv = _mm256_loadu_ps(v + i);
    mv = _mm256_add_ps(_mm256_mul_ps(vb1, mv), _mm256_mul_ps(vomb1, gv));
    vv = _mm256_add_ps(_mm256_mul_ps(vb2, vv),
                       _mm256_mul_ps(_mm256_mul_ps(vomb2, gv), gv));
    _mm256_storeu_ps(m + i, mv);
    _mm256_storeu_ps(v + i, vv);
    const __m256 mhat = _mm256_div_ps(mv, vbias1);
    const __m256 vhat = _mm256_div_ps(vv, vbias2);
    const __m256 den = _mm256_add_ps(_mm256_sqrt_ps(vhat), veps);
    const __m256 upd = _mm256_div_ps(_mm256_mul_ps(vlr, mhat), den);
    _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), upd));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + omb1 * g[i];
    v[i] = beta2 * v[i] + (omb2 * g[i]) * g[i];
    const float mhat = m[i] / bias1;
    const float vhat = v[i] / bias2;
    p[i] -= (lr * mhat) / (std::sqrt(vhat) + eps);
  }
}

// ---------------------------------------------------------------------------
// double
// ---------------------------------------------------------------------------

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void relu_f64(const double* x, double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_grad_f64(const double* x, const double* gy, double* gx,
                   std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    __m256d g = _mm256_and_pd(_mm256_loadu_pd(gy + i), mask);
    _mm256_storeu_pd(gx + i, _mm256_add_pd(_mm256_loadu_pd(gx + i), g));
  }
  for (; i < n; ++i)
    if (x[i] > 0.0) gx[i] += gy[i];
}

void add_f64(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] + b[i];
}

void sub_f64(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] - b[i];
}

void mul_f64(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] * b[i];
}

void axpy_f64(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_shift_f64(const double* x, double a, double b, double* y,
                     std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(t, bv));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b;
}

double sum_f64(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matmul_f64(const double* A, const double* B, double* C, std::size_t m,
                std::size_t k, std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c = C + i * n;
    if (!acc) std::fill(c, c + n, 0.0);
    const double* a = A + i * k;
    std::size_t l = 0;
    for (; l + 4 <= k; l += 4) {
      const __m256d a0 = _mm256_set1_pd(a[l + 0]);
      const __m256d a1 = _mm256_set1_pd(a[l + 1]);
      const __m256d a2 = _mm256_set1_pd(a[l + 2]);
      const __m256d a3 = _mm256_set1_pd(a[l + 3]);
      const double* b0 = B + (l + 0) * n;
      const double* b1 = B + (l + 1) * n;
      const double* b2 = B + (l + 2) * n;
      const double* b3 = B + (l + 3) * n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d cv = _mm256_loadu_pd(c + j);
        cv = _mm256_fmadd_pd(a0, _mm256_loadu_pd(b0 + j), cv);
        cv = _mm256_fmadd_pd(a1, _mm256_loadu_pd(b1 + j), cv);
        cv = _mm256_fmadd_pd(a2, _mm256_loadu_pd(b2 + j), cv);
        cv = _mm256_fmadd_pd(a3, _mm256_loadu_pd(b3 + j), cv);
        _mm256_storeu_pd(c + j, cv);
      }
      for (; j < n; ++j)
        c[j] += a[l] * b0[j] + a[l + 1] * b1[j] + a[l + 2] * b2[j] +
                a[l + 3] * b3[j];
    }
    for (; l < k; ++l) {
      const __m256d av = _mm256_set1_pd(a[l]);
      const double* b = B + l * n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d cv = _mm256_loadu_pd(c + j);
        cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j), cv);
        _mm256_storeu_pd(c + j, cv);
      }
      for (; j < n; ++j) c[j] += a[l] * b[j];
    }
  }
}

void matmul_nt_f64(const double* A, const double* B, double* C, std::size_t m,
                   std::size_t k, std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      double s = dot_f64(a, B + j * k, k);
      double& c = C[i * n + j];
      c = acc ? c + s : s;
    }
  }
}

void matmul_tn_f64(const double* A, const double* B, double* C, std::size_t m,
                   std::size_t k, std::size_t n, bool acc) {
  if (!acc) std::fill(C, C + m * n, 0.0);
  for (std::size_t l = 0; l < k; ++l) {
    const double* a = A + l * m;
    const double* b = B + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const __m256d av = _mm256_set1_pd(a[i]);
      double* c = C + i * n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d cv = _mm256_loadu_pd(c + j);
        cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j), cv);
        _mm256_storeu_pd(c + j, cv);
      }
      for (; j < n; ++j) c[j] += a[i] * b[j];
    }
  }
}

void adam_step_f64(double* p, const double* g, double* m, double* v,
                   std::size_t n, double lr, double beta1, double beta2,
                   double eps, double bias1, double bias2) {
  const double omb1 = 1.0 - beta1;
  const double omb2 = 1.0 - beta2;
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(omb1);
  const __m256d vomb2 = _mm256_set1_pd(omb2);
  const __m256d vbias1 = _mm256_set1_pd(bias1);
  const __m256d vbias2 = _mm256_set1_pd(bias2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gv = _mm256_loadu_pd(g + i);
    __m256d mv = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    mv = _mm256_add_pd(_mm256_mul_pd(vb1, mv), _mm256_mul_pd(vomb1, gv));
    vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv),
                       _mm256_mul_pd(_mm256_mul_pd(vomb2, gv), gv));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_div_pd(mv, vbias1);
    const __m256d vhat = _mm256_div_pd(vv, vbias2);
    const __m256d den = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d upd = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), den);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), upd));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + omb1 * g[i];
    v[i] = beta2 * v[i] + (omb2 * g[i]) * g[i];
    const double mhat = m[i] / bias1;
    const double vhat = v[i] / bias2;
    p[i] -= (lr * mhat) / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

namespace detail {

const Ops<float>& avx2_ops_f32() {
  static const Ops<float> t = [] {
    Ops<float> o{};
    o.relu = relu_f32;
    o.relu_grad = relu_grad_f32;
    o.add = add_f32;
    o.sub = sub_f32;
    o.mul = mul_f32;
    o.axpy = axpy_f32;
    o.scale_shift = scale_shift_f32;
    o.sum = sum_f32;
    o.dot = dot_f32;
    o.matmul = matmul_f32;
    o.matmul_nt = matmul_nt_f32;
    o.matmul_tn = matmul_tn_f32;
    o.adam_step = adam_step_f32;
    return o;
  }();
  return t;
}

const Ops<double>& avx2_ops_f64() {
  static const Ops<double> t = [] {
    Ops<double> o{};
    o.relu = relu_f64;
    o.relu_grad = relu_grad_f64;
    o.add = add_f64;
    o.sub = sub_f64;
    o.mul = mul_f64;
    o.axpy = axpy_f64;
    o.scale_shift = scale_shift_f64;
    o.sum = sum_f64;
    o.dot = dot_f64;
    o.matmul = matmul_f64;
    o.matmul_nt = matmul_nt_f64;
    o.matmul_tn = matmul_tn_f64;
    o.adam_step = adam_step_f64;
    return o;
  }();
  return t;
}

}  // namespace detail
}  // namespace pecnet::kern

#endif  // PECNET_HAVE_AVX2_TU
