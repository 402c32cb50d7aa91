#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pecnet/checkpoint.hpp"
#include "pecnet/errors.hpp"
#include "pecnet/kernels.hpp"
#include "pecnet/rng.hpp"
#include "pecnet/tape.hpp"
#include "pecnet/tensor.hpp"

namespace pecnet {

// Plain fully-connected stack: ReLU between layers, affine (identity) final
// layer so outputs stay sign-unrestricted (coordinates, mu, log-variance).
struct MlpSpec {
  std::string name;
  std::vector<std::size_t> widths;

  MlpSpec(std::string n, std::vector<std::size_t> w)
      : name(std::move(n)), widths(std::move(w)) {
    if (widths.size() < 2)
      throw ConfigError("mlp '" + name + "' needs at least 2 widths");
    for (std::size_t x : widths)
      if (x == 0) throw ConfigError("mlp '" + name + "' has a zero width");
  }

  std::size_t in() const { return widths.front(); }
  std::size_t out() const { return widths.back(); }
  std::size_t layers() const { return widths.size() - 1; }

  std::size_t param_count() const {
    std::size_t c = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
      c += widths[l] * widths[l + 1] + widths[l + 1];
    return c;
  }
};

template <typename T>
struct MlpBinding {
  std::vector<typename Tape<T>::NodeId> w, b;
};

template <typename T>
class Mlp {
 public:
  explicit Mlp(MlpSpec spec) : spec_(std::move(spec)) {
    for (std::size_t l = 0; l < spec_.layers(); ++l) {
      w_.emplace_back(Shape{spec_.widths[l], spec_.widths[l + 1]});
      b_.emplace_back(Shape{spec_.widths[l + 1]});
    }
  }

  // Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
  void init(Rng& rng) {
    for (std::size_t l = 0; l < w_.size(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(w_[l].rows()));
      rng.fill_uniform(w_[l], -bound, bound);
      for (std::size_t i = 0; i < b_[l].numel(); ++i) b_[l][i] = T(0);
    }
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    if (x.rank() != 2 || x.cols() != spec_.in()) {
      throw ShapeError("mlp '" + spec_.name + "': input " +
                       shape_str(x.shape()) + " vs expected width " +
                       std::to_string(spec_.in()));
    }
    const auto& k = kern::ops<T>();
    Tensor<T> cur = x;
    for (std::size_t l = 0; l < w_.size(); ++l) {
      const std::size_t B = cur.rows(), n = cur.cols(), m = w_[l].cols();
      Tensor<T> y({B, m});
      k.matmul(cur.data(), w_[l].data(), y.data(), B, n, m, false);
      for (std::size_t r = 0; r < B; ++r)
        k.add(y.data() + r * m, b_[l].data(), y.data() + r * m, m);
      if (l + 1 < w_.size()) k.relu(y.data(), y.data(), y.numel());
      cur = std::move(y);
    }
    return cur;
  }

  MlpBinding<T> bind(Tape<T>& tape) const {
    MlpBinding<T> ids;
    for (std::size_t l = 0; l < w_.size(); ++l) {
      ids.w.push_back(tape.leaf(w_[l]));
      ids.b.push_back(tape.leaf(b_[l]));
    }
    return ids;
  }

  typename Tape<T>::NodeId forward_tape(Tape<T>& tape,
                                        const MlpBinding<T>& ids,
                                        typename Tape<T>::NodeId x) const {
    auto cur = x;
    for (std::size_t l = 0; l < w_.size(); ++l) {
      cur = tape.linear(cur, ids.w[l], ids.b[l]);
      if (l + 1 < w_.size()) cur = tape.relu(cur);
    }
    return cur;
  }

  const MlpSpec& spec() const { return spec_; }
  std::size_t layers() const { return w_.size(); }
  Tensor<T>& weight(std::size_t l) { return w_[l]; }
  Tensor<T>& bias(std::size_t l) { return b_[l]; }
  const Tensor<T>& weight(std::size_t l) const { return w_[l]; }
  const Tensor<T>& bias(std::size_t l) const { return b_[l]; }

 private:
  MlpSpec spec_;
  std::vector<Tensor<T>> w_, b_;
};

// Sub-network widths; defaults are the published architecture, overridable
// from run config but validated for internal consistency.
struct ModelWidths {
  std::vector<std::size_t> e_past = {16, 512, 256, 16};
  std::vector<std::size_t> e_end = {2, 8, 16, 16};
  std::vector<std::size_t> e_latent = {32, 8, 50, 32};
  std::vector<std::size_t> d_latent = {32, 1024, 512, 1024, 2};
  std::vector<std::size_t> phi = {32, 512, 64, 128};
  std::vector<std::size_t> theta = {32, 512, 64, 128};
  std::vector<std::size_t> g = {32, 512, 64, 32};
  std::vector<std::size_t> p_future = {32, 1024, 512, 256, 22};
};

// Holds all eight sub-networks. Read-only during evaluation (safe to share
// across threads); exclusively owned during a training step.
template <typename T>
class ModelParams {
 public:
  explicit ModelParams(const ModelWidths& w = ModelWidths{})
      : e_past(MlpSpec("e_past", w.e_past)),
        e_end(MlpSpec("e_end", w.e_end)),
        e_latent(MlpSpec("e_latent", w.e_latent)),
        d_latent(MlpSpec("d_latent", w.d_latent)),
        phi(MlpSpec("phi", w.phi)),
        theta(MlpSpec("theta", w.theta)),
        g(MlpSpec("g", w.g)),
        p_future(MlpSpec("p_future", w.p_future)) {
    validate(w);
  }

  std::size_t t_past() const { return e_past.spec().in() / 2; }
  std::size_t t_future() const { return p_future.spec().out() / 2 + 1; }
  std::size_t latent_dim() const { return e_latent.spec().out() / 2; }
  std::size_t feat_dim() const {
    return e_past.spec().out() + e_end.spec().out();
  }

  void init(std::uint64_t seed) {
    Rng rng(seed);
    std::uint64_t idx = 0;
    for_each_net([&](Mlp<T>& net) {
      Rng sub = rng.fork(idx++);
      net.init(sub);
    });
  }

  std::size_t param_count() const {
    return e_past.spec().param_count() + e_end.spec().param_count() +
           e_latent.spec().param_count() + d_latent.spec().param_count() +
           phi.spec().param_count() + theta.spec().param_count() +
           g.spec().param_count() + p_future.spec().param_count();
  }

  // Stable traversal order; names like "e_past.0.w" are the checkpoint keys.
  void for_each_param(
      const std::function<void(const std::string&, Tensor<T>&)>& fn) {
    for_each_net([&](Mlp<T>& net) {
      for (std::size_t l = 0; l < net.layers(); ++l) {
        fn(net.spec().name + "." + std::to_string(l) + ".w", net.weight(l));
        fn(net.spec().name + "." + std::to_string(l) + ".b", net.bias(l));
      }
    });
  }

  std::vector<std::string> param_names() {
    std::vector<std::string> out;
    for_each_param([&](const std::string& n, Tensor<T>&) { out.push_back(n); });
    return out;
  }

  std::vector<Shape> param_shapes() {
    std::vector<Shape> out;
    for_each_param(
        [&](const std::string&, Tensor<T>& t) { out.push_back(t.shape()); });
    return out;
  }

  void save(CheckpointWriter& w) {
    for_each_param([&](const std::string& name, Tensor<T>& t) {
      w.add(name, t);
    });
  }

  void load(const std::vector<CheckpointRecord>& recs) {
    for_each_param([&](const std::string& name, Tensor<T>& t) {
      const CheckpointRecord* r = find_record(recs, name);
      if (!r) throw IoError("checkpoint missing parameter '" + name + "'");
      if (r->shape != t.shape())
        throw ShapeError("checkpoint parameter '" + name + "' has shape " +
                         shape_str(r->shape) + ", model expects " +
                         shape_str(t.shape()));
      t = r->template as<T>();
    });
  }

  template <typename Fn>
  void for_each_net(Fn&& fn) {
    fn(e_past);
    fn(e_end);
    fn(e_latent);
    fn(d_latent);
    fn(phi);
    fn(theta);
    fn(g);
    fn(p_future);
  }

  Mlp<T> e_past, e_end, e_latent, d_latent, phi, theta, g, p_future;

 private:
  void validate(const ModelWidths&) const {
    const std::size_t past_out = e_past.spec().out();
    const std::size_t end_out = e_end.spec().out();
    if (e_past.spec().in() % 2 != 0)
      throw ConfigError("e_past input width must be 2*t_past");
    if (e_end.spec().in() != 2)
      throw ConfigError("e_end consumes a 2-d endpoint");
    if (e_latent.spec().in() != past_out + end_out)
      throw ConfigError("e_latent input must equal e_past.out + e_end.out");
    if (e_latent.spec().out() % 2 != 0)
      throw ConfigError("e_latent output must split into mu | log-variance");
    const std::size_t zdim = e_latent.spec().out() / 2;
    if (d_latent.spec().in() != zdim + past_out)
      throw ConfigError("d_latent input must equal latent_dim + e_past.out");
    if (d_latent.spec().out() != 2)
      throw ConfigError("d_latent emits a 2-d endpoint");
    const std::size_t feat = past_out + end_out;
    if (phi.spec().in() != feat || theta.spec().in() != feat ||
        g.spec().in() != feat || p_future.spec().in() != feat)
      throw ConfigError("pooling nets must consume e_past.out + e_end.out");
    if (phi.spec().out() != theta.spec().out())
      throw ConfigError("phi and theta must share an output width");
    if (g.spec().out() != feat)
      throw ConfigError("g must preserve the pooled feature width");
    if (p_future.spec().out() % 2 != 0)
      throw ConfigError("p_future output must be 2*(t_future-1)");
  }
};

template <typename T>
struct ModelBinding {
  MlpBinding<T> e_past, e_end, e_latent, d_latent, phi, theta, g, p_future;
};

template <typename T>
ModelBinding<T> bind_model(Tape<T>& tape, const ModelParams<T>& m) {
  ModelBinding<T> b;
  b.e_past = m.e_past.bind(tape);
  b.e_end = m.e_end.bind(tape);
  b.e_latent = m.e_latent.bind(tape);
  b.d_latent = m.d_latent.bind(tape);
  b.phi = m.phi.bind(tape);
  b.theta = m.theta.bind(tape);
  b.g = m.g.bind(tape);
  b.p_future = m.p_future.bind(tape);
  return b;
}

}  // namespace pecnet
