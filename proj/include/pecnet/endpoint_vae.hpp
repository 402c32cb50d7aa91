#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pecnet/errors.hpp"
#include "pecnet/model.hpp"
#include "pecnet/rng.hpp"
#include "pecnet/tensor.hpp"

namespace pecnet {

// log-variance is clamped to this range before exponentiation, so sigma
// stays finite early in training.
inline constexpr double kLogVarClamp = 10.0;

template <typename T>
struct LatentParams {
  Tensor<T> mu;       // [B x d]
  Tensor<T> log_var;  // [B x d], clamped
};

// Latent sampling knobs for evaluation. With truncation the per-coordinate
// bound is truncation_c * sqrt(K - 1); K = 1 therefore pins z to zero and
// the prediction becomes deterministic.
struct SamplingConfig {
  int k = 20;
  double sigma_t = 1.0;  // std-dev multiplier of the latent prior
  double truncation_c = 1.2;
  bool truncate = false;

  double bound() const {
    return truncation_c * std::sqrt(static_cast<double>(k - 1));
  }
};

// Posterior parameters from the latent encoder: E_latent(past ++ endpoint)
// split down the middle into mu | log-variance, order-preserving over the
// batch.
template <typename T>
LatentParams<T> posterior_params(const ModelParams<T>& m,
                                 const Tensor<T>& past_feat,
                                 const Tensor<T>& endpoint_feat) {
  if (past_feat.rows() != endpoint_feat.rows())
    throw ShapeError("posterior_params: batch mismatch " +
                     shape_str(past_feat.shape()) + " vs " +
                     shape_str(endpoint_feat.shape()));
  const std::size_t B = past_feat.rows();
  const std::size_t na = past_feat.cols(), nb = endpoint_feat.cols();
  Tensor<T> cat({B, na + nb});
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t c = 0; c < na; ++c) cat.at2(r, c) = past_feat.at2(r, c);
    for (std::size_t c = 0; c < nb; ++c)
      cat.at2(r, na + c) = endpoint_feat.at2(r, c);
  }
  Tensor<T> out = m.e_latent.forward(cat);
  if (!out.all_finite())
    throw NumericError("posterior_params: non-finite latent output "
                       "(training divergence)");
  const std::size_t d = out.cols() / 2;
  LatentParams<T> lp{Tensor<T>({B, d}), Tensor<T>({B, d})};
  const T lo = static_cast<T>(-kLogVarClamp), hi = static_cast<T>(kLogVarClamp);
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      lp.mu.at2(r, c) = out.at2(r, c);
      T lv = out.at2(r, d + c);
      lp.log_var.at2(r, c) = lv < lo ? lo : (lv > hi ? hi : lv);
    }
  }
  return lp;
}

// z = mu + sigma (.) eps with sigma = exp(log_var / 2); eps is supplied by
// the caller so the op stays deterministic.
template <typename T>
Tensor<T> reparameterize(const LatentParams<T>& lp, const Tensor<T>& eps) {
  if (!lp.mu.same_shape(eps))
    throw ShapeError("reparameterize: eps " + shape_str(eps.shape()) +
                     " vs mu " + shape_str(lp.mu.shape()));
  Tensor<T> z(lp.mu.shape());
  for (std::size_t i = 0; i < z.numel(); ++i) {
    const T sigma = std::exp(lp.log_var[i] / T(2));
    z[i] = lp.mu[i] + sigma * eps[i];
  }
  return z;
}

// G-hat = D_latent(z ++ past_feat).
template <typename T>
Tensor<T> decode_endpoint(const ModelParams<T>& m, const Tensor<T>& z,
                          const Tensor<T>& past_feat) {
  if (z.rows() != past_feat.rows())
    throw ShapeError("decode_endpoint: batch mismatch " +
                     shape_str(z.shape()) + " vs " +
                     shape_str(past_feat.shape()));
  const std::size_t B = z.rows(), nz = z.cols(), np = past_feat.cols();
  Tensor<T> cat({B, nz + np});
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t c = 0; c < nz; ++c) cat.at2(r, c) = z.at2(r, c);
    for (std::size_t c = 0; c < np; ++c)
      cat.at2(r, nz + c) = past_feat.at2(r, c);
  }
  return m.d_latent.forward(cat);
}

// K i.i.d. prior draws, each coordinate sigma_t * N(0,1); with truncation
// every coordinate is rejection-resampled (not clipped) into
// [-c sqrt(K-1), +c sqrt(K-1)]. A zero bound (K = 1) short-circuits to the
// all-zero vector without consuming the stream.
template <typename T>
std::vector<Tensor<T>> sample_prior(const SamplingConfig& cfg, Rng& rng,
                                    std::size_t dim) {
  if (cfg.k < 1) throw ConfigError("sample_prior: K must be >= 1");
  if (cfg.sigma_t <= 0) throw ConfigError("sample_prior: sigma_t must be > 0");
  if (cfg.truncate && cfg.truncation_c <= 0)
    throw ConfigError("sample_prior: truncation_c must be > 0");
  std::vector<Tensor<T>> out;
  out.reserve(static_cast<std::size_t>(cfg.k));
  const double bound = cfg.truncate ? cfg.bound() : 0.0;
  for (int s = 0; s < cfg.k; ++s) {
    Tensor<T> z({dim});
    if (cfg.truncate && bound == 0.0) {
      out.push_back(std::move(z));  // already zeros
      continue;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      double x = cfg.sigma_t * rng.normal();
      if (cfg.truncate) {
        while (std::abs(x) > bound) x = cfg.sigma_t * rng.normal();
      }
      z[i] = static_cast<T>(x);
    }
    out.push_back(std::move(z));
  }
  return out;
}

// Closed-form KL(N(mu, sigma^2) || N(0, I)), summed over latent dims and
// averaged over the batch.
template <typename T>
double kl_divergence(const LatentParams<T>& lp) {
  const std::size_t B = lp.mu.rows();
  double acc = 0.0;
  for (std::size_t i = 0; i < lp.mu.numel(); ++i) {
    const double mu = static_cast<double>(lp.mu[i]);
    const double lv = static_cast<double>(lp.log_var[i]);
    acc += mu * mu + std::exp(lv) - 1.0 - lv;
  }
  return 0.5 * acc / static_cast<double>(B);
}

}  // namespace pecnet
