#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nclab {

/// Thrown when operand shapes do not chain; the message names both shapes.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles. Values are treated as immutable once a
/// matrix has been handed out by an operation; share freely across threads.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    bool all_finite() const;
    std::string shape_str() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Standard product. Throws ShapeError unless a.cols == b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

/// a += scale * b, elementwise. Shapes must match.
void axpy(Matrix& a, double scale, const Matrix& b);

void scale_inplace(Matrix& a, double factor);

double frobenius_norm(const Matrix& a);

}  // namespace nclab
