#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dwrl/error.hpp"

namespace dwrl {

// Dense row-major tensor of 64-bit reals. Kept deliberately small: shape plus
// flat storage, with just the accessors the MLP engine needs.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> s) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(element_count(shape)), 0.0);
  }

  static Tensor zeros(std::vector<std::int64_t> s) { return Tensor(std::move(s)); }

  static Tensor full(std::vector<std::int64_t> s, double value) {
    Tensor t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), value);
    return t;
  }

  static Tensor row(std::vector<double> values) {
    Tensor t;
    t.shape = {1, static_cast<std::int64_t>(values.size())};
    t.data = std::move(values);
    return t;
  }

  static Tensor vec(std::vector<double> values) {
    Tensor t;
    t.shape = {static_cast<std::int64_t>(values.size())};
    t.data = std::move(values);
    return t;
  }

  static std::int64_t element_count(const std::vector<std::int64_t>& s) {
    std::int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
  }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  std::int64_t rows() const { return shape.size() == 2 ? shape[0] : (shape.empty() ? 0 : 1); }
  std::int64_t cols() const { return shape.empty() ? 0 : shape.back(); }

  double& at(std::int64_t r, std::int64_t c) { return data[static_cast<std::size_t>(r * cols() + c)]; }
  double at(std::int64_t r, std::int64_t c) const { return data[static_cast<std::size_t>(r * cols() + c)]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    os << "]";
    return os.str();
  }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const std::string& what) {
  if (!a.same_shape(b)) {
    throw DimensionError(what + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
}

}  // namespace dwrl
