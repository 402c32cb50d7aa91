#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "pecnet/tensor.hpp"

namespace pecnet {

// Deterministic, forkable random stream. All stochastic choices in the
// project (weight init, latent draws, shuffles, synthetic scenes) come from
// streams forked off one base seed, so runs replay exactly and parallel
// draws merge in a fixed order. Normal variates use Box-Muller over a
// splitmix64 engine, keeping sequences independent of standard-library
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    state_ = mix(seed ^ kGolden);
    fork_base_ = state_;
    // warm up past trivially correlated first outputs for tiny seeds
    next_u64();
    next_u64();
  }

  // Independent child stream; a function of (this stream's seed, label)
  // only, not of how much this stream has been consumed.
  Rng fork(std::uint64_t label) const {
    return Rng(mix(fork_base_ + (label + 1) * kGolden));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += kGolden);
    return mix(z);
  }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n); modulo bias is negligible for the small n used here
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Box-Muller; u1 nudged away from 0 so log stays finite
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  template <typename T>
  void fill_normal(Tensor<T>& t) {
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = static_cast<T>(normal());
  }

  template <typename T>
  void fill_uniform(Tensor<T>& t, double lo, double hi) {
    for (std::size_t i = 0; i < t.numel(); ++i)
      t[i] = static_cast<T>(uniform(lo, hi));
  }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = uniform_int(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
  std::uint64_t fork_base_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pecnet
