#pragma once

#include <stdexcept>
#include <string>

namespace pecnet {

// Tensor dimension mismatch; the message names both offending shapes.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite ones are required (divergence, bad gradients).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// File / stream problems; message carries path and, where known, line number.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad run configuration (unknown key, out-of-range value, missing file).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pecnet
