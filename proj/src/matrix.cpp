#include "nclab/matrix.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nclab {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("Matrix data length " + std::to_string(data_.size()) +
                         " does not equal " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeError("from_rows: ragged row " + std::to_string(i));
        }
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: shapes " + a.shape_str() + " and " + b.shape_str() +
                         " do not chain");
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(m, n);
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    // i-k-j order: the inner loop updates independent accumulators, so it
    // vectorizes under strict FP and each output element is a fixed-order sum.
    // Threading splits whole output rows; per-element arithmetic is identical
    // to the serial path, keeping results bitwise independent of thread count.
    const bool big = m * k * n >= (std::size_t{1} << 22);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (big)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        double* crow = pc + static_cast<std::size_t>(i) * n;
        const double* arow = pa + static_cast<std::size_t>(i) * k;
        for (std::size_t q = 0; q < k; ++q) {
            const double aval = arow[q];
            const double* brow = pb + q * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aval * brow[j];
        }
    }
    (void)big;
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

void axpy(Matrix& a, double scale, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("axpy: shapes " + a.shape_str() + " and " + b.shape_str() +
                         " differ");
    }
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] += scale * pb[i];
}

void scale_inplace(Matrix& a, double factor) {
    double* p = a.data();
    for (std::size_t i = 0; i < a.size(); ++i) p[i] *= factor;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0; i < a.size(); ++i) s += p[i] * p[i];
    return std::sqrt(s);
}

}  // namespace nclab
