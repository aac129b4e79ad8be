#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace chainkb {

using Vector = std::vector<double>;

// Dense row-major matrix of 64-bit reals. Training is done entirely in
// doubles: finite-difference checks at 1e-4 are not reliable in floats.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void set_zero() { data_.assign(data_.size(), 0.0); }

  bool all_finite() const {
    for (double x : data_) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// result[i] = sum_j M[i,j] * v[j], summed in ascending j so tests can
// compare against a plain loop oracle bit for bit.
Vector matvec(const Matrix& m, std::span<const double> v);

// result[j] = sum_i M[i,j] * v[i], ascending i. Used by the backward passes.
Vector matvec_transposed(const Matrix& m, std::span<const double> v);

// M[i,j] += scale * u[i] * v[j]
void add_outer(Matrix& m, std::span<const double> u, std::span<const double> v,
               double scale = 1.0);

double dot(std::span<const double> a, std::span<const double> b);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

Vector relu(std::span<const double> v);
// Subgradient at 0 is defined as 0, matching the forward bookkeeping.
Vector relu_grad(std::span<const double> v);

// Numerically stable logistic function. The result is nudged away from the
// exact 0.0 / 1.0 that extreme inputs would underflow to, keeping the output
// strictly inside (0, 1) for every finite argument.
inline double sigmoid(double x) {
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  if (p <= 0.0) return std::numeric_limits<double>::denorm_min();
  if (p >= 1.0) return 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return p;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace chainkb
