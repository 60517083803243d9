// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pricer {

using Vec = std::vector<double>;

// Dense row-major matrix. The library needs elementwise access, fills and a
// few reductions; heavier linear algebra never occurs, so this stays minimal.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat constant(std::size_t rows, std::size_t cols, double v) {
    return Mat(rows, cols, v);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  double& at(std::size_t i, std::size_t j) {
    check_bounds(i, j);
    return a_[i * cols_ + j];
  }
  double at(std::size_t i, std::size_t j) const {
    check_bounds(i, j);
    return a_[i * cols_ + j];
  }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  // Copies row i into a Vec.
  Vec row(std::size_t i) const {
    Vec r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = a_[i * cols_ + j];
    return r;
  }

  void set_row(std::size_t i, const Vec& r) {
    if (r.size() != cols_) throw std::invalid_argument("row size mismatch");
    for (std::size_t j = 0; j < cols_; ++j) a_[i * cols_ + j] = r[j];
  }

  bool same_shape(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

 private:
  void check_bounds(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw std::out_of_range("Mat::at");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

inline double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double squared_norm(const Vec& x) { return dot(x, x); }

inline double squared_distance(const Vec& x, const Vec& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("squared_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

// Compensated (Kahan) accumulator; keeps long Monte-Carlo sums stable and
// makes the result independent of how partial sums would be merged.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace pricer
