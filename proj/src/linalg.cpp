#include "xorcop/linalg.hpp"

#include <cmath>
#include <utility>

#include "xorcop/error.hpp"

namespace xorcop {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + shape_string());
  }
  require_finite();
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + shape_string());
  }
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix " + shape_string() + " needs " + std::to_string(rows * cols) +
                     " entries, got " + std::to_string(data_.size()));
  }
  require_finite();
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  if (rows_ == 0 || cols_ == 0) {
    throw ShapeError("matrix dimensions must be positive");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw ShapeError("ragged matrix literal: expected rows of length " + std::to_string(cols_));
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite();
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::row(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

double Matrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) {
    throw ShapeError("index (" + std::to_string(r) + "," + std::to_string(c) +
                     ") out of range for " + shape_string());
  }
  return (*this)(r, c);
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void Matrix::require_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw DomainError("matrix entry is not finite");
  }
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("cannot multiply " + a.shape_string() + " by " + b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  out.require_finite();
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix mat_add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("cannot add " + a.shape_string() + " and " + b.shape_string());
  }
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  out.require_finite();
  return out;
}

Matrix mat_inverse(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw ShapeError("cannot invert non-square matrix " + a.shape_string());
  }
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix inv = Matrix::identity(n);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    }
    if (std::abs(work(pivot, col)) < kSingularPivot) {
      throw SingularMatrixError("matrix " + a.shape_string() + " is singular (pivot " +
                                std::to_string(work(pivot, col)) + " in column " +
                                std::to_string(col) + ")");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(work(pivot, c), work(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    }
    const double scale = 1.0 / work(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      work(col, c) *= scale;
      inv(col, c) *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = work(r, col);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) -= factor * work(col, c);
        inv(r, c) -= factor * inv(col, c);
      }
    }
  }
  return inv;
}

namespace {

void check_regression_layout(const Matrix& inputs, const Matrix& targets) {
  if (targets.rows() != 1 || targets.cols() != inputs.cols()) {
    throw ShapeError("targets must be 1x" + std::to_string(inputs.cols()) + ", got " +
                     targets.shape_string());
  }
  const std::size_t bias = inputs.rows() - 1;
  for (std::size_t j = 0; j < inputs.cols(); ++j) {
    if (inputs(bias, j) != 1.0) {
      throw DomainError("inputs must end with a bias row of ones (column " + std::to_string(j) +
                        " has " + std::to_string(inputs(bias, j)) + ")");
    }
  }
}

}  // namespace

Matrix least_squares(const Matrix& inputs, const Matrix& targets) {
  check_regression_layout(inputs, targets);
  const Matrix inputs_t = transpose(inputs);
  const Matrix gram = mat_mul(inputs, inputs_t);
  Matrix gram_inv;
  try {
    gram_inv = mat_inverse(gram);
  } catch (const SingularMatrixError& e) {
    throw RankDeficientError(std::string("least squares: Gram matrix is rank deficient: ") +
                             e.what());
  }
  return transpose(mat_mul(gram_inv, mat_mul(inputs, transpose(targets))));
}

double least_squares_sse(const Matrix& weights, const Matrix& inputs, const Matrix& targets) {
  check_regression_layout(inputs, targets);
  const Matrix fitted = mat_mul(weights, inputs);
  double sse = 0.0;
  for (std::size_t j = 0; j < inputs.cols(); ++j) {
    const double r = fitted(0, j) - targets(0, j);
    sse += r * r;
  }
  return sse;
}

}  // namespace xorcop
