#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace loadgen::nn {

/// Dense row-major matrix of doubles. Rows are batch entries, columns are features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    /// Copies `values` into a rows x cols matrix; values.size() must equal rows * cols.
    static Matrix from_values(std::size_t rows, std::size_t cols, std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    std::string shape_string() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Products. All throw ShapeError on inner-dimension mismatch.

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

/// [a | b]: rows must agree.
Matrix hconcat(const Matrix& a, const Matrix& b);
/// Columns [first, first + count) of m.
Matrix column_block(const Matrix& m, std::size_t first, std::size_t count);
/// Rows listed in `indices`, in that order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices);

/// Column sums (length cols).
std::vector<double> column_sums(const Matrix& m);
/// Column means (length cols); m must have at least one row.
std::vector<double> column_means(const Matrix& m);

bool all_finite(std::span<const double> values) noexcept;
/// Throws NumericError naming `what` if any entry is NaN or Inf.
void require_finite(const Matrix& m, const std::string& what);

}  // namespace loadgen::nn
