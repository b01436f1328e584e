#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace taoquant::linalg {

/// Small column-major dense matrix. Regression designs are tall and thin
/// (hundreds of rows, a handful of columns), so everything downstream works
/// on whole columns via the kernel layer.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    [[nodiscard]] std::span<double> col(std::size_t j) {
        return {data_.data() + j * rows_, rows_};
    }
    [[nodiscard]] std::span<const double> col(std::size_t j) const {
        return {data_.data() + j * rows_, rows_};
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Mat matmul(const Mat& a, const Mat& b);

/// X'X (symmetric, cols x cols).
Mat gram(const Mat& x);

/// X'y.
std::vector<double> tvec(const Mat& x, std::span<const double> y);

/// Cholesky factorization A = LL' of a symmetric positive-definite matrix.
/// A non-positive pivot means the matrix is singular to working precision;
/// the error names the offending column when names are supplied (regression
/// callers pass design-column names so collinear regressors are identifiable).
class Cholesky {
  public:
    explicit Cholesky(const Mat& a, const std::vector<std::string>& names = {});

    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;
    [[nodiscard]] Mat inverse() const;

    /// v' A^{-1} v.
    [[nodiscard]] double inv_quad(std::span<const double> v) const;

  private:
    Mat l_;
};

}  // namespace taoquant::linalg
