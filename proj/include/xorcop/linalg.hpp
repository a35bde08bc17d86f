#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace xorcop {

/// Small dense row-major matrix. Entries are always finite; constructors
/// that accept data reject NaN and infinities.
class Matrix {
public:
  Matrix() = default;

  /// rows x cols matrix filled with `fill`.
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  /// Takes ownership of row-major `data`; data.size() must equal rows*cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Nested-list construction: {{1, 2}, {3, 4}}. All rows must be the same
  /// length.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);
  static Matrix row(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  /// Bounds-checked access; throws ShapeError.
  double at(std::size_t r, std::size_t c) const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> row_span(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  /// "RxC", used in error messages.
  std::string shape_string() const;

  /// Throws DomainError if any entry is NaN or infinite.
  void require_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix mat_add(const Matrix& a, const Matrix& b);

/// Pivot magnitude below which a matrix is treated as singular.
inline constexpr double kSingularPivot = 1e-12;

/// Gauss-Jordan inversion with partial pivoting. Throws SingularMatrixError
/// when the best available pivot is below kSingularPivot.
Matrix mat_inverse(const Matrix& a);

/// Closed-form least squares in the augmented-input layout:
///
///   weights = ((inputs * inputs^T)^-1 * (inputs * targets^T))^T
///
/// `inputs` is (k+1) x n with a final row of ones (bias), `targets` is 1 x n.
/// Returns the 1 x (k+1) weight row; the last entry is the bias.
/// Throws RankDeficientError if the Gram matrix is singular.
Matrix least_squares(const Matrix& inputs, const Matrix& targets);

/// Sum of squared residuals of `weights` (1 x (k+1)) on the same layout.
double least_squares_sse(const Matrix& weights, const Matrix& inputs, const Matrix& targets);

}  // namespace xorcop
