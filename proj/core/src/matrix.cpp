#include "tenas/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tenas/common.hpp"

namespace tenas {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) + " != " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::gram() const {
  Matrix g(rows_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto ri = row(i);
    for (std::size_t j = i; j < rows_; ++j) {
      const auto rj = row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < cols_; ++k) acc += ri[k] * rj[k];
      g(i, j) = acc;
      g(j, i) = acc;
    }
  }
  return g;
}

double Matrix::frobenius_norm() const noexcept {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

double Matrix::relative_asymmetry() const noexcept {
  if (!square()) return INFINITY;
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      scale = std::max(scale, std::abs((*this)(i, j)));
      diff = std::max(diff, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return diff / std::max(1.0, scale);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matrix product dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += v * b(k, j);
    }
  return out;
}

}  // namespace tenas
