#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "pecnet/data.hpp"
#include "pecnet/endpoint_vae.hpp"
#include "pecnet/errors.hpp"
#include "pecnet/model.hpp"
#include "pecnet/social_pool.hpp"

namespace pecnet {

using Point = std::array<double, 2>;
using Track = std::vector<Point>;

// K conditioned points and K full futures for one agent, in original
// (denormalized) coordinates. Each future carries its conditioned point at
// the configured waypoint slot, so at the default (last point) the future's
// final row equals its endpoint exactly.
struct AgentPrediction {
  std::vector<Point> endpoints;
  std::vector<Track> futures;
};

struct PredictionSet {
  std::vector<AgentPrediction> agents;
};

struct PredictSettings {
  int pool_rounds = 3;
  std::size_t waypoint = 12;  // 1-based conditioning index
  bool oracle = false;        // true: ground-truth conditioned point, no sampling
  double data_scale = 1.0;
};

// Evaluation path: K prior draws per agent (independent per agent), each
// decoded to an endpoint, re-encoded, socially pooled jointly across the
// scene per sample index, then expanded to a full future.
template <typename T>
PredictionSet predict(const SceneBatch& batch, const ModelParams<T>& params,
                      const SamplingConfig& scfg, const PredictSettings& ps,
                      Rng& rng) {
  const std::size_t B = batch.samples.size();
  if (B == 0) return {};
  if (batch.mask.size() != B)
    throw ShapeError("predict: mask size vs batch size");
  const std::size_t t_p = params.t_past();
  const std::size_t t_f = params.t_future();
  const std::size_t zdim = params.latent_dim();
  if (ps.waypoint < 1 || ps.waypoint > t_f)
    throw ConfigError("predict: waypoint outside 1..t_f");
  const std::size_t w = ps.waypoint;

  std::vector<NormSample> norm;
  norm.reserve(B);
  Tensor<T> past_flat({B, 2 * t_p});
  for (std::size_t i = 0; i < B; ++i) {
    norm.push_back(normalize(batch.samples[i], ps.data_scale));
    for (std::size_t t = 0; t < t_p; ++t) {
      past_flat.at2(i, 2 * t) = static_cast<T>(norm[i].past[t][0]);
      past_flat.at2(i, 2 * t + 1) = static_cast<T>(norm[i].past[t][1]);
    }
  }
  const Tensor<T> fpast = params.e_past.forward(past_flat);

  // per-agent latent draws from forked streams; merge order is fixed
  std::vector<std::vector<Tensor<T>>> zs(B);
  if (!ps.oracle) {
    for (std::size_t i = 0; i < B; ++i) {
      Rng arng = rng.fork(i);
      zs[i] = sample_prior<T>(scfg, arng, zdim);
    }
  }

  PredictionSet out;
  out.agents.resize(B);
  const int K = ps.oracle ? scfg.k : static_cast<int>(zs[0].size());
  for (int k = 0; k < K; ++k) {
    Tensor<T> g_hat({B, 2});
    if (ps.oracle) {
      for (std::size_t i = 0; i < B; ++i) {
        g_hat.at2(i, 0) = static_cast<T>(norm[i].future[w - 1][0]);
        g_hat.at2(i, 1) = static_cast<T>(norm[i].future[w - 1][1]);
      }
    } else {
      Tensor<T> z({B, zdim});
      for (std::size_t i = 0; i < B; ++i)
        for (std::size_t d = 0; d < zdim; ++d)
          z.at2(i, d) = zs[i][static_cast<std::size_t>(k)][d];
      g_hat = decode_endpoint(params, z, fpast);
    }

    Tensor<T> fend = params.e_end.forward(g_hat);
    Tensor<T> x({B, fpast.cols() + fend.cols()});
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t c = 0; c < fpast.cols(); ++c)
        x.at2(i, c) = fpast.at2(i, c);
      for (std::size_t c = 0; c < fend.cols(); ++c)
        x.at2(i, fpast.cols() + c) = fend.at2(i, c);
    }
    x = social_pool(x, batch.mask, ps.pool_rounds, params.phi, params.theta,
                    params.g);
    const Tensor<T> pred = params.p_future.forward(x);

    for (std::size_t i = 0; i < B; ++i) {
      Track fut(t_f);
      std::size_t src = 0;
      for (std::size_t t = 0; t < t_f; ++t) {
        Point p;
        if (t == w - 1) {
          p = {static_cast<double>(g_hat.at2(i, 0)),
               static_cast<double>(g_hat.at2(i, 1))};
        } else {
          p = {static_cast<double>(pred.at2(i, 2 * src)),
               static_cast<double>(pred.at2(i, 2 * src + 1))};
          ++src;
        }
        fut[t] = denorm_point(p, norm[i].offset, norm[i].scale);
      }
      // the oracle hands over the conditioned point itself, exactly
      if (ps.oracle) fut[w - 1] = batch.samples[i].future[w - 1];
      out.agents[i].endpoints.push_back(fut[w - 1]);
      out.agents[i].futures.push_back(std::move(fut));
    }
  }
  return out;
}

// Mean over the future steps of pointwise l2 distance.
inline double ade(const Track& pred, const Track& gt) {
  if (pred.size() != gt.size() || pred.empty())
    throw ShapeError("ade: tracks of length " + std::to_string(pred.size()) +
                     " vs " + std::to_string(gt.size()));
  double acc = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t)
    acc += std::hypot(pred[t][0] - gt[t][0], pred[t][1] - gt[t][1]);
  return acc / static_cast<double>(pred.size());
}

// l2 distance at the final step.
inline double fde(const Track& pred, const Track& gt) {
  if (pred.size() != gt.size() || pred.empty())
    throw ShapeError("fde: tracks of length " + std::to_string(pred.size()) +
                     " vs " + std::to_string(gt.size()));
  const std::size_t t = pred.size() - 1;
  return std::hypot(pred[t][0] - gt[t][0], pred[t][1] - gt[t][1]);
}

struct EvalResult {
  double ade = 0.0;
  double fde = 0.0;
  double waypoint_err = 0.0;
  int trials = 0;
};

// Best-of-K reduction for one agent against its ground truth: min-ADE over
// the K futures, min-FDE independently, min way-point error at index w-1.
struct AgentBestOfK {
  double ade = 0.0, fde = 0.0, waypoint_err = 0.0;
};

inline AgentBestOfK best_of_k(const AgentPrediction& pred, const Track& gt,
                              std::size_t waypoint) {
  if (pred.futures.empty()) throw ShapeError("best_of_k: no samples");
  AgentBestOfK r{std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
  for (const Track& f : pred.futures) {
    r.ade = std::min(r.ade, ade(f, gt));
    r.fde = std::min(r.fde, fde(f, gt));
    const Point& p = f[waypoint - 1];
    const Point& q = gt[waypoint - 1];
    r.waypoint_err = std::min(r.waypoint_err, std::hypot(p[0] - q[0], p[1] - q[1]));
  }
  return r;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Per trial, per agent: best-of-K reduction, averaged over agents, then over
// trials. Trial t draws from seed base_seed + t; trials may run on several
// threads and are merged in trial order, so the result is thread-count
// independent.
template <typename T>
EvalResult evaluate_best_of_k(const std::vector<SceneBatch>& data,
                              const ModelParams<T>& params,
                              const SamplingConfig& scfg,
                              const PredictSettings& ps, int trials,
                              std::uint64_t base_seed, int threads = 1) {
  if (trials < 1) throw ConfigError("evaluate_best_of_k: trials < 1");
  std::size_t n_agents = 0;
  for (const SceneBatch& b : data) n_agents += b.samples.size();
  if (n_agents == 0) throw ConfigError("evaluate_best_of_k: empty dataset");

  std::vector<std::array<double, 3>> per_trial(static_cast<std::size_t>(trials));
  detail::parallel_for(
      static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        Rng trial_rng(base_seed + t);
        double a = 0.0, f = 0.0, wp = 0.0;
        for (std::size_t bi = 0; bi < data.size(); ++bi) {
          Rng brng = trial_rng.fork(bi);
          const PredictionSet pred =
              predict(data[bi], params, scfg, ps, brng);
          for (std::size_t i = 0; i < data[bi].samples.size(); ++i) {
            const AgentBestOfK r = best_of_k(
                pred.agents[i], data[bi].samples[i].future, ps.waypoint);
            a += r.ade;
            f += r.fde;
            wp += r.waypoint_err;
          }
        }
        per_trial[t] = {a / static_cast<double>(n_agents),
                        f / static_cast<double>(n_agents),
                        wp / static_cast<double>(n_agents)};
      });

  EvalResult res;
  for (const auto& tr : per_trial) {
    res.ade += tr[0];
    res.fde += tr[1];
    res.waypoint_err += tr[2];
  }
  res.ade /= trials;
  res.fde /= trials;
  res.waypoint_err /= trials;
  res.trials = trials;
  return res;
}

}  // namespace pecnet
