#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gstqa::nn {

class ShapeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix of doubles. Vectors are 1xN, scalars 1x1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Tensor row(std::initializer_list<double> xs) {
    Tensor t(1, xs.size());
    std::size_t j = 0;
    for (double x : xs) t.data_[j++] = x;
    return t;
  }

  static Tensor from(std::size_t rows, std::size_t cols, std::vector<double> data) {
    if (data.size() != rows * cols)
      throw ShapeMismatch("Tensor::from: data length does not match shape");
    Tensor t;
    t.rows_ = rows;
    t.cols_ = cols;
    t.data_ = std::move(data);
    return t;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  std::vector<std::size_t> shape() const { return {rows_, cols_}; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double scalar() const {
    if (size() != 1) throw ShapeMismatch("Tensor::scalar: tensor is not 1x1");
    return data_[0];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline bool all_finite(const Tensor& t) {
  for (double x : t.data())
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(const Tensor& t, const std::string& where) {
  if (!all_finite(t)) throw NonFiniteError("non-finite value in " + where);
}

inline void fill_normal(Tensor& t, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& x : t.data()) x = dist(rng);
}

// out = a * b
inline void matmul_nn(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate = false) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k || out.rows() != m || out.cols() != n)
    throw ShapeMismatch("matmul_nn: inner dimensions disagree");
  if (!accumulate)
    for (double& x : out.data()) x = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.row_ptr(i);
    const double* arow = a.row_ptr(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b.row_ptr(p);
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

// out = a * b^T   (a: m x k, b: n x k, out: m x n)
inline void matmul_nt(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate = false) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k || out.rows() != m || out.cols() != n)
    throw ShapeMismatch("matmul_nt: inner dimensions disagree");
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b.row_ptr(j);
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      orow[j] = accumulate ? orow[j] + acc : acc;
    }
  }
}

// out = a^T * b   (a: m x k, b: m x n, out: k x n)
inline void matmul_tn(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate = false) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != m || out.rows() != k || out.cols() != n)
    throw ShapeMismatch("matmul_tn: inner dimensions disagree");
  if (!accumulate)
    for (double& x : out.data()) x = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a.row_ptr(i);
    const double* brow = b.row_ptr(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      double* orow = out.row_ptr(p);
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

}  // namespace gstqa::nn
