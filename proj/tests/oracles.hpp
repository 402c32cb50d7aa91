#pragma once

// Independent reference computations the test suites check against. These
// stay deliberately naive (triple loops, exhaustive scans, quadrature) and
// never call into the kernel/tape paths they verify.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pecnet/rng.hpp"
#include "pecnet/tensor.hpp"

namespace oracle {

// C[m x n] = A[m x k] B[k x n], triple loop
template <typename T>
pecnet::Tensor<T> matmul(const pecnet::Tensor<T>& a,
                         const pecnet::Tensor<T>& b) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  pecnet::Tensor<T> c({m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T s = T(0);
      for (std::size_t l = 0; l < k; ++l) s += a.at2(i, l) * b.at2(l, j);
      c.at2(i, j) = s;
    }
  return c;
}

template <typename T>
pecnet::Tensor<T> linear(const pecnet::Tensor<T>& x,
                         const pecnet::Tensor<T>& w,
                         const pecnet::Tensor<T>& b) {
  pecnet::Tensor<T> y = matmul(x, w);
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t c = 0; c < y.cols(); ++c) y.at2(r, c) += b[c];
  return y;
}

// central finite differences d f / d x[i], f scalar-valued
template <typename T, typename F>
double central_diff(pecnet::Tensor<T>& x, std::size_t i, double h, F&& f) {
  const T saved = x[i];
  x[i] = saved + static_cast<T>(h);
  const double fp = f();
  x[i] = saved - static_cast<T>(h);
  const double fm = f();
  x[i] = saved;
  return (fp - fm) / (2.0 * h);
}

inline double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

// literal evaluation of the two social-mask conditions over raw windows:
// all-pairs spatial minimum vs t_dist, and the product of frame-difference
// minima for the temporal term
struct MaskTrack {
  std::vector<std::array<double, 2>> pos;
  std::vector<long long> frames;
};

inline bool mask_entry(const MaskTrack& a, const MaskTrack& b, double t_dist) {
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& pa : a.pos)
    for (const auto& pb : b.pos)
      dmin = std::min(dmin, std::hypot(pa[0] - pb[0], pa[1] - pb[1]));
  if (dmin > t_dist) return false;
  long long m1 = std::numeric_limits<long long>::max();
  for (const long long f : b.frames)
    m1 = std::min(m1, std::abs(a.frames.front() - f));
  long long m2 = std::numeric_limits<long long>::max();
  for (const long long f : a.frames)
    m2 = std::min(m2, std::abs(f - b.frames.front()));
  if (m1 * m2 > 0) return false;
  return true;
}

// Eq.-style masked attention round by direct summation
template <typename T>
pecnet::Tensor<T> attention_round(const pecnet::Tensor<T>& x,
                                  const std::vector<std::vector<int>>& mask,
                                  const pecnet::Tensor<T>& phi_x,
                                  const pecnet::Tensor<T>& theta_x,
                                  const pecnet::Tensor<T>& g_x) {
  const std::size_t n = x.rows(), f = x.cols(), d = phi_x.cols();
  pecnet::Tensor<T> out = x;
  for (std::size_t i = 0; i < n; ++i) {
    // stabilized exactly like the implementation: max-subtract over unmasked
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!mask[i][j]) continue;
      double dot = 0;
      for (std::size_t c = 0; c < d; ++c)
        dot += static_cast<double>(phi_x.at2(i, c)) *
               static_cast<double>(theta_x.at2(j, c));
      mx = std::max(mx, dot);
    }
    double denom = 0;
    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (!mask[i][j]) continue;
      double dot = 0;
      for (std::size_t c = 0; c < d; ++c)
        dot += static_cast<double>(phi_x.at2(i, c)) *
               static_cast<double>(theta_x.at2(j, c));
      w[j] = std::exp(dot - mx);
      denom += w[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] == 0.0) continue;
      for (std::size_t c = 0; c < f; ++c)
        out.at2(i, c) += static_cast<T>(w[j] / denom) * g_x.at2(j, c);
    }
  }
  return out;
}

// trapezoid quadrature of the 1-d KL integrand
// KL(N(mu, s^2) || N(0,1)) = \int q(x) log(q(x)/p(x)) dx
inline double kl_quadrature(double mu, double sigma) {
  const double lo = mu - 12.0 * sigma - 12.0, hi = mu + 12.0 * sigma + 12.0;
  const int n = 400000;
  const double dx = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * dx;
    const double q = std::exp(-0.5 * (x - mu) * (x - mu) / (sigma * sigma)) /
                     (sigma * std::sqrt(2.0 * M_PI));
    if (q < 1e-300) continue;
    const double p = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    const double term = q * std::log(q / p);
    acc += (i == 0 || i == n) ? 0.5 * term : term;
  }
  return acc * dx;
}

template <typename T>
pecnet::Tensor<T> random_tensor(pecnet::Rng& rng, pecnet::Shape shape,
                                double lo = -1.0, double hi = 1.0) {
  pecnet::Tensor<T> t(std::move(shape));
  rng.fill_uniform(t, lo, hi);
  return t;
}

}  // namespace oracle
