#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pecnet/adam.hpp"
#include "pecnet/checkpoint.hpp"
#include "pecnet/data.hpp"
#include "pecnet/endpoint_vae.hpp"
#include "pecnet/errors.hpp"
#include "pecnet/model.hpp"
#include "pecnet/rng.hpp"
#include "pecnet/tape.hpp"

namespace pecnet {

// Knobs consumed by one forward/backward pass.
struct ForwardSettings {
  double lambda1 = 1.0;  // KL weight
  double lambda2 = 1.0;  // endpoint-loss weight
  int pool_rounds = 3;
  std::size_t waypoint = 12;  // 1-based conditioning index; t_future = standard
  double data_scale = 1.0;
};

struct LossParts {
  double kl = 0.0;
  double ael = 0.0;
  double atl = 0.0;
  double total = 0.0;
};

template <typename T>
struct TrainingGraph {
  ModelBinding<T> binding;
  typename Tape<T>::NodeId kl, ael, atl, total;
};

// Training path: posterior z from (E_past, E_end(conditioned point)), decoded
// endpoint guess; pooling and prediction consume the *sampled* guess, not the
// ground truth. The assembled trajectory places the guess at the conditioning
// index and the network's points elsewhere, so the endpoint earns gradient
// from both the endpoint loss and the trajectory loss.
template <typename T>
TrainingGraph<T> build_training_graph(Tape<T>& tape, const SceneBatch& batch,
                                      const ModelParams<T>& params,
                                      const ForwardSettings& fs,
                                      const Tensor<T>& eps) {
  const std::size_t B = batch.samples.size();
  if (B == 0) throw ShapeError("build_training_graph: empty batch");
  if (batch.mask.size() != B)
    throw ShapeError("build_training_graph: mask size " +
                     std::to_string(batch.mask.size()) + " vs batch " +
                     std::to_string(B));
  const std::size_t t_p = params.t_past();
  const std::size_t t_f = params.t_future();
  if (fs.waypoint < 1 || fs.waypoint > t_f)
    throw ConfigError("waypoint index " + std::to_string(fs.waypoint) +
                      " outside 1.." + std::to_string(t_f));
  const std::size_t w = fs.waypoint;

  Tensor<T> past_flat({B, 2 * t_p});
  Tensor<T> cond({B, 2});
  Tensor<T> future_flat({B, 2 * t_f});
  for (std::size_t i = 0; i < B; ++i) {
    const Sample& s = batch.samples[i];
    if (s.past.size() != t_p || s.future.size() != t_f)
      throw ShapeError("sample window " + std::to_string(s.past.size()) + "+" +
                       std::to_string(s.future.size()) +
                       " does not match model " + std::to_string(t_p) + "+" +
                       std::to_string(t_f));
    const NormSample ns = normalize(s, fs.data_scale);
    for (std::size_t t = 0; t < t_p; ++t) {
      past_flat.at2(i, 2 * t) = static_cast<T>(ns.past[t][0]);
      past_flat.at2(i, 2 * t + 1) = static_cast<T>(ns.past[t][1]);
    }
    for (std::size_t t = 0; t < t_f; ++t) {
      future_flat.at2(i, 2 * t) = static_cast<T>(ns.future[t][0]);
      future_flat.at2(i, 2 * t + 1) = static_cast<T>(ns.future[t][1]);
    }
    cond.at2(i, 0) = static_cast<T>(ns.future[w - 1][0]);
    cond.at2(i, 1) = static_cast<T>(ns.future[w - 1][1]);
  }

  TrainingGraph<T> g;
  g.binding = bind_model(tape, params);

  const auto past_in = tape.leaf(past_flat);
  const auto cond_in = tape.leaf(cond);
  const auto fut_in = tape.leaf(future_flat);
  const auto eps_in = tape.leaf(eps);

  const auto fpast = params.e_past.forward_tape(tape, g.binding.e_past, past_in);
  const auto fend_gt = params.e_end.forward_tape(tape, g.binding.e_end, cond_in);

  const std::size_t zdim = params.latent_dim();
  const auto lat = params.e_latent.forward_tape(
      tape, g.binding.e_latent, tape.concat_cols(fpast, fend_gt));
  const auto mu = tape.slice_cols(lat, 0, zdim);
  const auto log_var = tape.clamp(tape.slice_cols(lat, zdim, zdim),
                                  static_cast<T>(-kLogVarClamp),
                                  static_cast<T>(kLogVarClamp));
  const auto sigma = tape.exp(tape.scale_shift(log_var, T(0.5), T(0)));
  const auto z = tape.add(mu, tape.mul(sigma, eps_in));

  const auto g_hat = params.d_latent.forward_tape(
      tape, g.binding.d_latent, tape.concat_cols(z, fpast));
  const auto fend_hat =
      params.e_end.forward_tape(tape, g.binding.e_end, g_hat);

  auto x = tape.concat_cols(fpast, fend_hat);
  const Tensor<T> mask_t = batch.mask.template as_tensor<T>();
  for (int r = 0; r < fs.pool_rounds; ++r) {
    const auto phi_x = params.phi.forward_tape(tape, g.binding.phi, x);
    const auto theta_x = params.theta.forward_tape(tape, g.binding.theta, x);
    const auto g_x = params.g.forward_tape(tape, g.binding.g, x);
    const auto weights =
        tape.masked_softmax(tape.matmul_nt(phi_x, theta_x), mask_t);
    x = tape.add(x, tape.matmul(weights, g_x));
  }

  const auto pred = params.p_future.forward_tape(tape, g.binding.p_future, x);

  // conditioned point spliced in at index w-1
  typename Tape<T>::NodeId traj;
  if (w == 1) {
    traj = tape.concat_cols(g_hat, pred);
  } else if (w == t_f) {
    traj = tape.concat_cols(pred, g_hat);
  } else {
    traj = tape.concat_cols(
        tape.concat_cols(tape.slice_cols(pred, 0, 2 * (w - 1)), g_hat),
        tape.slice_cols(pred, 2 * (w - 1), 2 * (t_f - w)));
  }

  // ATL: mean over agents and the t_f future points of squared l2 error
  const auto tdiff = tape.sub(traj, fut_in);
  g.atl = tape.scale_shift(tape.sum(tape.mul(tdiff, tdiff)),
                           T(1) / static_cast<T>(B * t_f), T(0));
  // AEL: mean over agents of squared l2 endpoint error
  const auto gdiff = tape.sub(g_hat, cond_in);
  g.ael = tape.scale_shift(tape.sum(tape.mul(gdiff, gdiff)),
                           T(1) / static_cast<T>(B), T(0));
  // KL(N(mu, sigma^2) || N(0, I)), summed over dims, averaged over batch
  const auto sig2 = tape.exp(log_var);
  const auto klterm = tape.scale_shift(
      tape.sub(tape.add(tape.mul(mu, mu), sig2), log_var), T(1), T(-1));
  g.kl = tape.scale_shift(tape.sum(klterm), T(0.5) / static_cast<T>(B), T(0));

  g.total = tape.add(tape.add(tape.scale_shift(g.kl, static_cast<T>(fs.lambda1), T(0)),
                              tape.scale_shift(g.ael, static_cast<T>(fs.lambda2), T(0))),
                     g.atl);
  return g;
}

template <typename T>
std::vector<typename Tape<T>::NodeId> binding_param_ids(
    const ModelBinding<T>& b) {
  std::vector<typename Tape<T>::NodeId> ids;
  for (const MlpBinding<T>* net :
       {&b.e_past, &b.e_end, &b.e_latent, &b.d_latent, &b.phi, &b.theta, &b.g,
        &b.p_future}) {
    for (std::size_t l = 0; l < net->w.size(); ++l) {
      ids.push_back(net->w[l]);
      ids.push_back(net->b[l]);
    }
  }
  return ids;
}

template <typename T>
LossParts read_losses(const Tape<T>& tape, const TrainingGraph<T>& g) {
  LossParts p;
  p.kl = static_cast<double>(tape.value(g.kl)[0]);
  p.ael = static_cast<double>(tape.value(g.ael)[0]);
  p.atl = static_cast<double>(tape.value(g.atl)[0]);
  p.total = static_cast<double>(tape.value(g.total)[0]);
  return p;
}

// Losses only (no parameter update); eps is the caller's N(0,1) draw.
template <typename T>
LossParts forward_train(const SceneBatch& batch, const ModelParams<T>& params,
                        const ForwardSettings& fs, const Tensor<T>& eps) {
  Tape<T> tape;
  const TrainingGraph<T> g = build_training_graph(tape, batch, params, fs, eps);
  return read_losses(tape, g);
}

// One Adam update over the batch. Throws NumericError on a non-finite loss,
// with the losses in the message.
template <typename T>
LossParts train_step(const SceneBatch& batch, ModelParams<T>& params,
                     AdamState<T>& opt, const std::vector<std::string>& names,
                     const ForwardSettings& fs, const Tensor<T>& eps) {
  Tape<T> tape;
  const TrainingGraph<T> g = build_training_graph(tape, batch, params, fs, eps);
  const LossParts parts = read_losses(tape, g);
  if (!std::isfinite(parts.total)) {
    throw NumericError("diverged: total=" + std::to_string(parts.total) +
                       " kl=" + std::to_string(parts.kl) +
                       " ael=" + std::to_string(parts.ael) +
                       " atl=" + std::to_string(parts.atl));
  }
  tape.backward(g.total);

  const auto ids = binding_param_ids(g.binding);
  std::vector<Tensor<T>*> tensors;
  std::vector<const Tensor<T>*> grads;
  tensors.reserve(ids.size());
  grads.reserve(ids.size());
  params.for_each_param([&](const std::string&, Tensor<T>& t) {
    tensors.push_back(&t);
  });
  for (auto id : ids) grads.push_back(&tape.grad(id));
  opt.step(tensors, grads, names);
  return parts;
}

// ---------------------------------------------------------------------------
// Checkpoint round-trip for model + optimizer + step counter
// ---------------------------------------------------------------------------

template <typename T>
void save_training_checkpoint(const std::string& path, ModelParams<T>& params,
                              const AdamState<T>& opt) {
  CheckpointWriter w(path);
  params.save(w);
  const auto names = params.param_names();
  for (std::size_t i = 0; i < opt.size(); ++i) {
    w.add("adam.m." + names[i], opt.moment1(i));
    w.add("adam.v." + names[i], opt.moment2(i));
  }
  w.add_scalar("adam.t", static_cast<double>(opt.t()));
  w.close();
}

template <typename T>
void save_model_checkpoint(const std::string& path, ModelParams<T>& params) {
  CheckpointWriter w(path);
  params.save(w);
  w.close();
}

template <typename T>
void load_training_checkpoint(const std::string& path, ModelParams<T>& params,
                              AdamState<T>* opt) {
  const auto recs = load_checkpoint(path);
  params.load(recs);
  if (!opt) return;
  const auto names = params.param_names();
  const CheckpointRecord* t_rec = find_record(recs, "adam.t");
  if (!t_rec) return;  // inference-only checkpoint
  for (std::size_t i = 0; i < opt->size(); ++i) {
    const CheckpointRecord* m = find_record(recs, "adam.m." + names[i]);
    const CheckpointRecord* v = find_record(recs, "adam.v." + names[i]);
    if (!m || !v)
      throw IoError("checkpoint has adam.t but lacks moments for '" +
                    names[i] + "'");
    opt->moment1(i) = m->template as<T>();
    opt->moment2(i) = v->template as<T>();
  }
  opt->set_t(static_cast<std::int64_t>(t_rec->f64.at(0)));
}

// ---------------------------------------------------------------------------
// Step loop
// ---------------------------------------------------------------------------

struct TrainLoopConfig {
  ForwardSettings forward;
  AdamConfig adam;
  std::uint64_t seed = 1;
  int epochs = 10;
  std::int64_t max_steps = 0;  // stop once opt.t() reaches this, 0 = no cap
  std::int64_t ckpt_every = 0;  // steps; 0 = final checkpoint only
  std::string ckpt_path;        // empty = no checkpointing
};

struct TrainLoopResult {
  bool diverged = false;
  std::string divergence_message;
  std::int64_t steps_done = 0;
  std::vector<LossParts> history;  // one entry per step
};

// Shuffled epochs of scene batches. Shuffle order and per-step latent noise
// derive from (seed, epoch) / (seed, step), so a run resumed from a
// checkpoint replays the interrupted schedule exactly. On divergence the
// last written checkpoint is left in place and the error is reported, not
// rethrown.
template <typename T>
TrainLoopResult run_train_loop(const std::vector<SceneBatch>& batches,
                               ModelParams<T>& params, AdamState<T>& opt,
                               const TrainLoopConfig& cfg) {
  if (batches.empty()) throw ConfigError("training set produced no batches");
  TrainLoopResult res;
  const auto names = params.param_names();
  const std::size_t zdim = params.latent_dim();
  const Rng seed_root = Rng(cfg.seed);
  const Rng shuffle_root = seed_root.fork(0xA001);
  const Rng eps_root = seed_root.fork(0xA002);

  const auto n_batches = static_cast<std::int64_t>(batches.size());
  std::int64_t step = opt.t();

  const auto save_ckpt = [&] {
    if (!cfg.ckpt_path.empty()) save_training_checkpoint(cfg.ckpt_path, params, opt);
  };

  for (int epoch = static_cast<int>(step / n_batches); epoch < cfg.epochs;
       ++epoch) {
    std::vector<std::size_t> order(batches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng srng = shuffle_root.fork(static_cast<std::uint64_t>(epoch));
    srng.shuffle(order.begin(), order.end());

    // mid-epoch resume: skip the batches this epoch already consumed
    const auto pos0 = step - static_cast<std::int64_t>(epoch) * n_batches;
    std::size_t pos = pos0 > 0 ? static_cast<std::size_t>(pos0) : 0;

    for (; pos < order.size(); ++pos) {
      if (cfg.max_steps > 0 && step >= cfg.max_steps) {
        save_ckpt();
        res.steps_done = step;
        return res;
      }
      const SceneBatch& batch = batches[order[pos]];
      Tensor<T> eps({batch.samples.size(), zdim});
      Rng erng = eps_root.fork(static_cast<std::uint64_t>(step));
      erng.fill_normal(eps);
      try {
        res.history.push_back(
            train_step(batch, params, opt, names, cfg.forward, eps));
      } catch (const NumericError& e) {
        res.diverged = true;
        res.divergence_message = std::string(e.what()) + " at step " +
                                 std::to_string(step) + " (epoch " +
                                 std::to_string(epoch) + ")";
        res.steps_done = step;
        return res;
      }
      ++step;
      if (cfg.ckpt_every > 0 && step % cfg.ckpt_every == 0) save_ckpt();
    }
  }
  save_ckpt();
  res.steps_done = step;
  return res;
}

}  // namespace pecnet
