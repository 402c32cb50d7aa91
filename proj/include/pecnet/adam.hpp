#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pecnet/errors.hpp"
#include "pecnet/kernels.hpp"
#include "pecnet/tensor.hpp"

namespace pecnet {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter first/second moments, keyed positionally against a stable
// parameter list. Single owner during a training step; t increases by
// exactly one per step().
template <typename T>
class AdamState {
 public:
  AdamState() = default;

  AdamState(AdamConfig cfg, const std::vector<Shape>& param_shapes)
      : cfg_(cfg) {
    for (const Shape& s : param_shapes) {
      m_.emplace_back(s);
      v_.emplace_back(s);
    }
  }

  // One update over all parameters. grads[i] pairs with params[i]; names are
  // only used in diagnostics.
  void step(const std::vector<Tensor<T>*>& params,
            const std::vector<const Tensor<T>*>& grads,
            const std::vector<std::string>& names) {
    if (params.size() != m_.size() || grads.size() != m_.size())
      throw ShapeError("adam: parameter list does not match state");
    for (std::size_t i = 0; i < grads.size(); ++i) {
      if (!grads[i]->all_finite())
        throw NumericError("adam: non-finite gradient for parameter '" +
                           (i < names.size() ? names[i] : std::to_string(i)) +
                           "'");
      if (!grads[i]->same_shape(*params[i]))
        throw ShapeError("adam: gradient " + shape_str(grads[i]->shape()) +
                         " vs parameter " + shape_str(params[i]->shape()));
    }
    ++t_;
    const T bias1 = T(1) - static_cast<T>(std::pow(cfg_.beta1, t_));
    const T bias2 = T(1) - static_cast<T>(std::pow(cfg_.beta2, t_));
    const auto& k = kern::ops<T>();
    for (std::size_t i = 0; i < params.size(); ++i) {
      k.adam_step(params[i]->data(), grads[i]->data(), m_[i].data(),
                  v_[i].data(), params[i]->numel(), static_cast<T>(cfg_.lr),
                  static_cast<T>(cfg_.beta1), static_cast<T>(cfg_.beta2),
                  static_cast<T>(cfg_.eps), bias1, bias2);
    }
  }

  std::int64_t t() const { return t_; }
  void set_t(std::int64_t t) { t_ = t; }
  const AdamConfig& config() const { return cfg_; }

  std::size_t size() const { return m_.size(); }
  Tensor<T>& moment1(std::size_t i) { return m_[i]; }
  Tensor<T>& moment2(std::size_t i) { return v_[i]; }
  const Tensor<T>& moment1(std::size_t i) const { return m_[i]; }
  const Tensor<T>& moment2(std::size_t i) const { return v_[i]; }

 private:
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
};

}  // namespace pecnet
