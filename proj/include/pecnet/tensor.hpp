#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pecnet/errors.hpp"

namespace pecnet {

using Shape = std::vector<std::size_t>;

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

inline std::size_t numel_of(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t e : s) n *= e;
  return n;
}

// Dense row-major tensor. Rank is almost always 1 (vectors/biases) or 2
// (batched features); scalars use shape {1}. Immutable once written into a
// tape node, so values can be shared read-only across threads.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    validate_shape();
    data_.assign(numel_of(shape_), T(0));
  }

  Tensor(Shape shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape();
    if (data_.size() != numel_of(shape_)) {
      throw ShapeError("tensor data size " + std::to_string(data_.size()) +
                       " does not match shape " + shape_str(shape_));
    }
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor full(Shape shape, T v) {
    Tensor t(std::move(shape));
    for (T& x : t.data_) x = v;
    return t;
  }

  // 1 x n row tensor, handy in tests.
  static Tensor row(std::initializer_list<T> vals) {
    return Tensor({1, vals.size()}, std::vector<T>(vals));
  }

  static Tensor vec(std::initializer_list<T> vals) {
    return Tensor({vals.size()}, std::vector<T>(vals));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t numel() const { return data_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }

  std::size_t rows() const {
    require_rank2("rows()");
    return shape_[0];
  }
  std::size_t cols() const {
    require_rank2("cols()");
    return shape_[1];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at2(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  const T& at2(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (const T& x : data_)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i)
      out[i] = static_cast<U>(data_[i]);
    return Tensor<U>(shape_, std::move(out));
  }

 private:
  void validate_shape() const {
    for (std::size_t e : shape_) {
      if (e == 0) throw ShapeError("zero extent in shape " + shape_str(shape_));
    }
  }
  void require_rank2(const char* what) const {
    if (shape_.size() != 2) {
      throw ShapeError(std::string(what) + " on tensor of shape " +
                       shape_str(shape_));
    }
  }

  Shape shape_;
  std::vector<T> data_;
};

}  // namespace pecnet
