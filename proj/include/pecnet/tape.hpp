#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pecnet/errors.hpp"
#include "pecnet/kernels.hpp"
#include "pecnet/tensor.hpp"

namespace pecnet {

// Reverse-mode autodiff over an ordered op record. Ops are appended in
// topological order by construction; backward() walks the record in exact
// reverse and accumulates gradients additively, so fan-out nodes sum their
// branch gradients. Single-owner, single-threaded during a training step.
template <typename T>
class Tape {
 public:
  using NodeId = std::int32_t;

  NodeId leaf(Tensor<T> value) {
    nodes_.push_back(std::move(value));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  const Tensor<T>& value(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }

  // y = x W + b, row-wise. x: [B x n], W: [n x m], b: [m].
  NodeId linear(NodeId xi, NodeId wi, NodeId bi) {
    const Tensor<T>& x = nodes_.at(xi);
    const Tensor<T>& w = nodes_.at(wi);
    const Tensor<T>& b = nodes_.at(bi);
    if (x.rank() != 2 || w.rank() != 2 || x.cols() != w.rows()) {
      throw ShapeError("linear: input " + shape_str(x.shape()) +
                       " incompatible with weight " + shape_str(w.shape()));
    }
    if (b.rank() != 1 || b.dim(0) != w.cols()) {
      throw ShapeError("linear: bias " + shape_str(b.shape()) +
                       " incompatible with weight " + shape_str(w.shape()));
    }
    const std::size_t B = x.rows(), n = x.cols(), m = w.cols();
    Tensor<T> y({B, m});
    const auto& k = kern::ops<T>();
    k.matmul(x.data(), w.data(), y.data(), B, n, m, false);
    for (std::size_t r = 0; r < B; ++r)
      k.add(y.data() + r * m, b.data(), y.data() + r * m, m);
    return record("linear", {xi, wi, bi}, std::move(y),
                  [this, xi, wi, bi, B, n, m](const Tensor<T>& gy) {
                    const auto& kk = kern::ops<T>();
                    kk.matmul_nt(gy.data(), nodes_[wi].data(), grads_[xi].data(),
                                 B, m, n, true);
                    kk.matmul_tn(nodes_[xi].data(), gy.data(), grads_[wi].data(),
                                 n, B, m, true);
                    for (std::size_t r = 0; r < B; ++r)
                      kk.axpy(T(1), gy.data() + r * m, grads_[bi].data(), m);
                  });
  }

  // y = A B. A: [m x k], B: [k x n].
  NodeId matmul(NodeId ai, NodeId bi) {
    const Tensor<T>& a = nodes_.at(ai);
    const Tensor<T>& b = nodes_.at(bi);
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
      throw ShapeError("matmul: " + shape_str(a.shape()) + " x " +
                       shape_str(b.shape()));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor<T> y({m, n});
    kern::ops<T>().matmul(a.data(), b.data(), y.data(), m, k, n, false);
    return record("matmul", {ai, bi}, std::move(y),
                  [this, ai, bi, m, k, n](const Tensor<T>& gy) {
                    const auto& kk = kern::ops<T>();
                    kk.matmul_nt(gy.data(), nodes_[bi].data(), grads_[ai].data(),
                                 m, n, k, true);
                    kk.matmul_tn(nodes_[ai].data(), gy.data(), grads_[bi].data(),
                                 k, m, n, true);
                  });
  }

  // y = A B^T. A: [m x k], B: [n x k].
  NodeId matmul_nt(NodeId ai, NodeId bi) {
    const Tensor<T>& a = nodes_.at(ai);
    const Tensor<T>& b = nodes_.at(bi);
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.cols()) {
      throw ShapeError("matmul_nt: " + shape_str(a.shape()) + " x " +
                       shape_str(b.shape()) + "^T");
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    Tensor<T> y({m, n});
    kern::ops<T>().matmul_nt(a.data(), b.data(), y.data(), m, k, n, false);
    return record("matmul_nt", {ai, bi}, std::move(y),
                  [this, ai, bi, m, k, n](const Tensor<T>& gy) {
                    const auto& kk = kern::ops<T>();
                    kk.matmul(gy.data(), nodes_[bi].data(), grads_[ai].data(), m,
                              n, k, true);
                    kk.matmul_tn(gy.data(), nodes_[ai].data(), grads_[bi].data(),
                                 n, m, k, true);
                  });
  }

  NodeId relu(NodeId xi) {
    const Tensor<T>& x = nodes_.at(xi);
    Tensor<T> y(x.shape());
    kern::ops<T>().relu(x.data(), y.data(), x.numel());
    return record("relu", {xi}, std::move(y),
                  [this, xi](const Tensor<T>& gy) {
                    kern::ops<T>().relu_grad(nodes_[xi].data(), gy.data(),
                                             grads_[xi].data(),
                                             nodes_[xi].numel());
                  });
  }

  NodeId add(NodeId ai, NodeId bi) {
    const Tensor<T>& a = check_same("add", ai, bi);
    Tensor<T> y(a.shape());
    kern::ops<T>().add(a.data(), nodes_[bi].data(), y.data(), a.numel());
    return record("add", {ai, bi}, std::move(y),
                  [this, ai, bi](const Tensor<T>& gy) {
                    const auto& kk = kern::ops<T>();
                    kk.axpy(T(1), gy.data(), grads_[ai].data(), gy.numel());
                    kk.axpy(T(1), gy.data(), grads_[bi].data(), gy.numel());
                  });
  }

  NodeId sub(NodeId ai, NodeId bi) {
    const Tensor<T>& a = check_same("sub", ai, bi);
    Tensor<T> y(a.shape());
    kern::ops<T>().sub(a.data(), nodes_[bi].data(), y.data(), a.numel());
    return record("sub", {ai, bi}, std::move(y),
                  [this, ai, bi](const Tensor<T>& gy) {
                    const auto& kk = kern::ops<T>();
                    kk.axpy(T(1), gy.data(), grads_[ai].data(), gy.numel());
                    kk.axpy(T(-1), gy.data(), grads_[bi].data(), gy.numel());
                  });
  }

  NodeId mul(NodeId ai, NodeId bi) {
    const Tensor<T>& a = check_same("mul", ai, bi);
    Tensor<T> y(a.shape());
    kern::ops<T>().mul(a.data(), nodes_[bi].data(), y.data(), a.numel());
    return record("mul", {ai, bi}, std::move(y),
                  [this, ai, bi](const Tensor<T>& gy) {
                    fma_acc(grads_[ai].data(), nodes_[bi].data(), gy.data(),
                            gy.numel());
                    fma_acc(grads_[bi].data(), nodes_[ai].data(), gy.data(),
                            gy.numel());
                  });
  }

  NodeId exp(NodeId xi) {
    const Tensor<T>& x = nodes_.at(xi);
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) y[i] = std::exp(x[i]);
    const NodeId yi = record("exp", {xi}, std::move(y), nullptr);
    ops_.back().backward = [this, xi, yi](const Tensor<T>& gy) {
      fma_acc(grads_[xi].data(), nodes_[yi].data(), gy.data(), gy.numel());
    };
    return yi;
  }

  // Pass-through gradient strictly inside (lo, hi), zero outside.
  NodeId clamp(NodeId xi, T lo, T hi) {
    const Tensor<T>& x = nodes_.at(xi);
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i)
      y[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
    return record("clamp", {xi}, std::move(y),
                  [this, xi, lo, hi](const Tensor<T>& gy) {
                    const Tensor<T>& x = nodes_[xi];
                    Tensor<T>& gx = grads_[xi];
                    for (std::size_t i = 0; i < x.numel(); ++i)
                      if (x[i] > lo && x[i] < hi) gx[i] += gy[i];
                  });
  }

  // y = a * x + b (elementwise, scalar a and b)
  NodeId scale_shift(NodeId xi, T a, T b) {
    const Tensor<T>& x = nodes_.at(xi);
    Tensor<T> y(x.shape());
    kern::ops<T>().scale_shift(x.data(), a, b, y.data(), x.numel());
    return record("scale_shift", {xi}, std::move(y),
                  [this, xi, a](const Tensor<T>& gy) {
                    kern::ops<T>().axpy(a, gy.data(), grads_[xi].data(),
                                        gy.numel());
                  });
  }

  NodeId concat_cols(NodeId ai, NodeId bi) {
    const Tensor<T>& a = nodes_.at(ai);
    const Tensor<T>& b = nodes_.at(bi);
    if (a.rank() != 2 || b.rank() != 2 || a.rows() != b.rows()) {
      throw ShapeError("concat_cols: " + shape_str(a.shape()) + " | " +
                       shape_str(b.shape()));
    }
    const std::size_t B = a.rows(), na = a.cols(), nb = b.cols();
    Tensor<T> y({B, na + nb});
    for (std::size_t r = 0; r < B; ++r) {
      for (std::size_t c = 0; c < na; ++c) y.at2(r, c) = a.at2(r, c);
      for (std::size_t c = 0; c < nb; ++c) y.at2(r, na + c) = b.at2(r, c);
    }
    return record("concat", {ai, bi}, std::move(y),
                  [this, ai, bi, B, na, nb](const Tensor<T>& gy) {
                    Tensor<T>& ga = grads_[ai];
                    Tensor<T>& gb = grads_[bi];
                    for (std::size_t r = 0; r < B; ++r) {
                      for (std::size_t c = 0; c < na; ++c)
                        ga.at2(r, c) += gy.at2(r, c);
                      for (std::size_t c = 0; c < nb; ++c)
                        gb.at2(r, c) += gy.at2(r, na + c);
                    }
                  });
  }

  NodeId slice_cols(NodeId xi, std::size_t first, std::size_t count) {
    const Tensor<T>& x = nodes_.at(xi);
    if (x.rank() != 2 || first + count > x.cols()) {
      throw ShapeError("slice_cols [" + std::to_string(first) + ", " +
                       std::to_string(first + count) + ") of " +
                       shape_str(x.shape()));
    }
    const std::size_t B = x.rows();
    Tensor<T> y({B, count});
    for (std::size_t r = 0; r < B; ++r)
      for (std::size_t c = 0; c < count; ++c) y.at2(r, c) = x.at2(r, first + c);
    return record("slice", {xi}, std::move(y),
                  [this, xi, first, count, B](const Tensor<T>& gy) {
                    Tensor<T>& gx = grads_[xi];
                    for (std::size_t r = 0; r < B; ++r)
                      for (std::size_t c = 0; c < count; ++c)
                        gx.at2(r, first + c) += gy.at2(r, c);
                  });
  }

  // Reduce every element to one scalar (shape {1}).
  NodeId sum(NodeId xi) {
    const Tensor<T>& x = nodes_.at(xi);
    Tensor<T> y({1});
    y[0] = kern::ops<T>().sum(x.data(), x.numel());
    return record("sum", {xi}, std::move(y),
                  [this, xi](const Tensor<T>& gy) {
                    Tensor<T>& gx = grads_[xi];
                    const T g = gy[0];
                    for (std::size_t i = 0; i < gx.numel(); ++i) gx[i] += g;
                  });
  }

  // Row-wise softmax over entries where mask != 0; masked entries get weight
  // zero. Logits are max-subtracted per row over the unmasked set before
  // exponentiation. Every row must keep at least one unmasked entry.
  NodeId masked_softmax(NodeId li, Tensor<T> mask) {
    const Tensor<T>& l = nodes_.at(li);
    if (l.rank() != 2 || !l.same_shape(mask)) {
      throw ShapeError("masked_softmax: logits " + shape_str(l.shape()) +
                       " vs mask " + shape_str(mask.shape()));
    }
    const std::size_t R = l.rows(), C = l.cols();
    Tensor<T> y({R, C});
    for (std::size_t r = 0; r < R; ++r) {
      T mx = T(0);
      bool seen = false;
      for (std::size_t c = 0; c < C; ++c) {
        if (mask.at2(r, c) != T(0) && (!seen || l.at2(r, c) > mx)) {
          mx = l.at2(r, c);
          seen = true;
        }
      }
      if (!seen)
        throw NumericError("masked_softmax: fully masked row " +
                           std::to_string(r));
      T denom = T(0);
      for (std::size_t c = 0; c < C; ++c) {
        const T e = mask.at2(r, c) != T(0) ? std::exp(l.at2(r, c) - mx) : T(0);
        y.at2(r, c) = e;
        denom += e;
      }
      for (std::size_t c = 0; c < C; ++c) y.at2(r, c) /= denom;
    }
    const NodeId yi = record("masked_softmax", {li}, std::move(y), nullptr);
    ops_.back().backward = [this, li, yi, R, C](const Tensor<T>& gy) {
      const Tensor<T>& yv = nodes_[yi];
      Tensor<T>& gl = grads_[li];
      for (std::size_t r = 0; r < R; ++r) {
        T d = T(0);
        for (std::size_t c = 0; c < C; ++c) d += gy.at2(r, c) * yv.at2(r, c);
        for (std::size_t c = 0; c < C; ++c)
          gl.at2(r, c) += yv.at2(r, c) * (gy.at2(r, c) - d);
      }
    };
    return yi;
  }

  // Scalar loss only; gradients accumulate for every node reachable from it.
  void backward(NodeId loss) {
    if (nodes_.at(loss).numel() != 1) {
      throw ShapeError("backward: loss must be scalar, got " +
                       shape_str(nodes_[loss].shape()));
    }
    grads_.clear();
    grads_.reserve(nodes_.size());
    for (const Tensor<T>& n : nodes_) grads_.emplace_back(n.shape());
    grads_[loss][0] = T(1);
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it)
      it->backward(grads_[it->out]);
  }

  const Tensor<T>& grad(NodeId id) const {
    if (grads_.empty()) throw NumericError("grad() before backward()");
    return grads_.at(id);
  }

  std::size_t op_count() const { return ops_.size(); }
  const char* op_name(std::size_t i) const { return ops_.at(i).name; }

 private:
  struct OpRecord {
    const char* name;
    std::vector<NodeId> inputs;
    NodeId out;
    std::function<void(const Tensor<T>&)> backward;
  };

  const Tensor<T>& check_same(const char* op, NodeId ai, NodeId bi) {
    const Tensor<T>& a = nodes_.at(ai);
    const Tensor<T>& b = nodes_.at(bi);
    if (!a.same_shape(b)) {
      throw ShapeError(std::string(op) + ": " + shape_str(a.shape()) + " vs " +
                       shape_str(b.shape()));
    }
    return a;
  }

  NodeId record(const char* name, std::initializer_list<NodeId> inputs,
                Tensor<T> y, std::function<void(const Tensor<T>&)> back) {
    nodes_.push_back(std::move(y));
    const NodeId out = static_cast<NodeId>(nodes_.size() - 1);
    ops_.push_back({name, std::vector<NodeId>(inputs), out, std::move(back)});
    return out;
  }

  static void fma_acc(T* dst, const T* a, const T* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * b[i];
  }

  std::vector<Tensor<T>> nodes_;
  std::vector<Tensor<T>> grads_;
  std::vector<OpRecord> ops_;
};

}  // namespace pecnet
