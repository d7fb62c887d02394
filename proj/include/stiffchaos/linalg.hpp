#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stiffchaos {

using State = std::vector<double>;

/// Small dense row-major matrix. Sizes here are 1..3 for the benchmark
/// problems, so no expression templates or blocking.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  [[nodiscard]] double trace() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

[[nodiscard]] State multiply(const Matrix& a, std::span<const double> x);

/// Solves a * x = b by Gaussian elimination with partial pivoting.
/// Throws std::runtime_error when a pivot is exactly zero or non-finite.
[[nodiscard]] State solve_linear(Matrix a, State b);

/// max_i |a_i - b_i|; sizes must agree.
[[nodiscard]] double max_abs_diff(std::span<const double> a, std::span<const double> b);

[[nodiscard]] bool all_finite(std::span<const double> x) noexcept;

}  // namespace stiffchaos
