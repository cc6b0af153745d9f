#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "jmetric/error.hpp"

namespace jmetric {

/// Dense rank-3 array over a chart of dimension dim(). Index meaning is fixed by the
/// producer; for connection-like tensors at(k, i, j) is the component with k upper.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Eigen::Index dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  Eigen::Index dim() const noexcept { return dim_; }
  double& at(Eigen::Index a, Eigen::Index b, Eigen::Index c) { return data_[offset(a, b, c)]; }
  double at(Eigen::Index a, Eigen::Index b, Eigen::Index c) const { return data_[offset(a, b, c)]; }
  const std::vector<double>& data() const noexcept { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend Tensor3 operator*(double s, Tensor3 a) {
    for (double& v : a.data_) v *= s;
    return a;
  }

 private:
  std::size_t offset(Eigen::Index a, Eigen::Index b, Eigen::Index c) const {
    return static_cast<std::size_t>((a * dim_ + b) * dim_ + c);
  }
  void check_same(const Tensor3& o) const {
    if (o.dim_ != dim_) throw Error("tensor dimension mismatch");
  }

  Eigen::Index dim_ = 0;
  std::vector<double> data_;
};

/// Rank-4 array; curvature stores R^l_{kij} at at(l, k, i, j).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Eigen::Index dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}

  Eigen::Index dim() const noexcept { return dim_; }
  double& at(Eigen::Index a, Eigen::Index b, Eigen::Index c, Eigen::Index d) { return data_[offset(a, b, c, d)]; }
  double at(Eigen::Index a, Eigen::Index b, Eigen::Index c, Eigen::Index d) const { return data_[offset(a, b, c, d)]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t offset(Eigen::Index a, Eigen::Index b, Eigen::Index c, Eigen::Index d) const {
    return static_cast<std::size_t>(((a * dim_ + b) * dim_ + c) * dim_ + d);
  }

  Eigen::Index dim_ = 0;
  std::vector<double> data_;
};

}  // namespace jmetric
