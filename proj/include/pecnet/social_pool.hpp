#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pecnet/errors.hpp"
#include "pecnet/kernels.hpp"
#include "pecnet/model.hpp"
#include "pecnet/tensor.hpp"

namespace pecnet {

// Binary agent-adjacency matrix. Symmetric with unit diagonal; under any
// ordering that groups scene components it is block diagonal.
class SocialMask {
 public:
  explicit SocialMask(std::size_t n) : n_(n), m_(n * n, 0) {
    for (std::size_t i = 0; i < n; ++i) m_[i * n + i] = 1;
  }

  std::size_t size() const { return n_; }
  bool at(std::size_t i, std::size_t j) const { return m_[i * n_ + j] != 0; }

  void set_pair(std::size_t i, std::size_t j) {
    m_[i * n_ + j] = 1;
    m_[j * n_ + i] = 1;
  }

  std::size_t edge_count() const {  // off-diagonal, undirected
    std::size_t e = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) e += at(i, j) ? 1 : 0;
    return e;
  }

  template <typename T>
  Tensor<T> as_tensor() const {
    Tensor<T> t({n_, n_});
    for (std::size_t i = 0; i < n_ * n_; ++i) t[i] = static_cast<T>(m_[i]);
    return t;
  }

 private:
  std::size_t n_;
  std::vector<std::uint8_t> m_;
};

// One agent's observed (past) window in original coordinates.
struct PastTrack {
  std::vector<std::array<double, 2>> pos;
  std::vector<std::int64_t> frames;
};

// Two tracks are social neighbours when some pair of their observed points
// comes within t_dist AND their observation windows overlap in frame time
// (interval overlap of [min frame, max frame], which reproduces the
// product-of-frame-minima test for contiguous equal-stride windows).
bool tracks_are_neighbors(const PastTrack& a, const PastTrack& b,
                          double t_dist);

SocialMask build_mask(const std::vector<PastTrack>& tracks, double t_dist);

// One masked non-local attention round:
//   X'_k = X_k + sum_j w_kj g(X_j),
//   w_kj = M_kj exp(phi(X_k) . theta(X_j)) / sum_j M_kj exp(...)
// Logits are max-subtracted per row over unmasked entries before exp.
template <typename T>
Tensor<T> pool_round(const Tensor<T>& X, const SocialMask& M,
                     const Mlp<T>& phi, const Mlp<T>& theta,
                     const Mlp<T>& g) {
  const std::size_t n = X.rows(), f = X.cols();
  if (M.size() != n)
    throw ShapeError("pool_round: mask size " + std::to_string(M.size()) +
                     " vs " + std::to_string(n) + " agents");
  const Tensor<T> phi_x = phi.forward(X);
  const Tensor<T> theta_x = theta.forward(X);
  const Tensor<T> g_x = g.forward(X);
  const std::size_t d = phi_x.cols();
  const auto& k = kern::ops<T>();

  Tensor<T> logits({n, n});
  k.matmul_nt(phi_x.data(), theta_x.data(), logits.data(), n, d, n, false);

  Tensor<T> w({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    T mx = T(0);
    bool seen = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (M.at(i, j) && (!seen || logits.at2(i, j) > mx)) {
        mx = logits.at2(i, j);
        seen = true;
      }
    }
    if (!seen) throw NumericError("pool_round: agent with empty mask row");
    T denom = T(0);
    for (std::size_t j = 0; j < n; ++j) {
      const T e = M.at(i, j) ? std::exp(logits.at2(i, j) - mx) : T(0);
      w.at2(i, j) = e;
      denom += e;
    }
    for (std::size_t j = 0; j < n; ++j) w.at2(i, j) /= denom;
  }

  Tensor<T> out = X;
  k.matmul(w.data(), g_x.data(), out.data(), n, n, f, true);
  return out;
}

// N-fold composition of pool_round; N = 0 is the identity (the no-pooling
// ablation path).
template <typename T>
Tensor<T> social_pool(const Tensor<T>& X, const SocialMask& M, int rounds,
                      const Mlp<T>& phi, const Mlp<T>& theta,
                      const Mlp<T>& g) {
  if (rounds < 0) throw ConfigError("social_pool: rounds must be >= 0");
  Tensor<T> cur = X;
  for (int r = 0; r < rounds; ++r) cur = pool_round(cur, M, phi, theta, g);
  return cur;
}

}  // namespace pecnet
