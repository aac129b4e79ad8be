#include "chainkb/numeric.hpp"

#include <stdexcept>
#include <string>

namespace chainkb {

Vector matvec(const Matrix& m, std::span<const double> v) {
  if (m.cols() != v.size()) {
    throw std::invalid_argument("matvec: matrix is " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()) +
                                " but vector has length " +
                                std::to_string(v.size()));
  }
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    const auto row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

Vector matvec_transposed(const Matrix& m, std::span<const double> v) {
  if (m.rows() != v.size()) {
    throw std::invalid_argument(
        "matvec_transposed: matrix has " + std::to_string(m.rows()) +
        " rows but vector has length " + std::to_string(v.size()));
  }
  Vector out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[j] * v[i];
  }
  return out;
}

void add_outer(Matrix& m, std::span<const double> u, std::span<const double> v,
               double scale) {
  if (m.rows() != u.size() || m.cols() != v.size()) {
    throw std::invalid_argument("add_outer: shape mismatch");
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    const double ui = scale * u[i];
    for (std::size_t j = 0; j < m.cols(); ++j) row[j] += ui * v[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector relu(std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : 0.0;
  return out;
}

Vector relu_grad(std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? 1.0 : 0.0;
  return out;
}

}  // namespace chainkb
