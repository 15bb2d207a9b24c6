#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "../errors.hpp"

namespace frontier_audit::detail {

// Dense row-major matrix just big enough for the regression designs this
// library builds (tens of columns at most). Not a linear-algebra library.
struct Matrix {
    size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
    double operator()(size_t i, size_t j) const { return a[i * cols + j]; }
};

inline Matrix matmul(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw ValidationError("matmul shape mismatch");
    Matrix out(x.rows, y.cols);
    for (size_t i = 0; i < x.rows; ++i)
        for (size_t k = 0; k < x.cols; ++k) {
            double v = x(i, k);
            if (v == 0.0) continue;
            for (size_t j = 0; j < y.cols; ++j) out(i, j) += v * y(k, j);
        }
    return out;
}

inline Matrix transpose(const Matrix& x) {
    Matrix out(x.cols, x.rows);
    for (size_t i = 0; i < x.rows; ++i)
        for (size_t j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
    return out;
}

// Gauss-Jordan inverse with partial pivoting. Throws on (near-)singularity,
// which is how rank-deficient designs surface to the caller.
inline Matrix invert(Matrix m) {
    if (m.rows != m.cols) throw ValidationError("cannot invert non-square matrix");
    const size_t n = m.rows;
    Matrix inv(n, n);
    for (size_t i = 0; i < n; ++i) inv(i, i) = 1.0;

    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(m(r, col)) > std::fabs(m(pivot, col))) pivot = r;
        if (std::fabs(m(pivot, col)) < 1e-12)
            throw ValidationError("singular matrix (rank-deficient design?)");
        if (pivot != col)
            for (size_t j = 0; j < n; ++j) {
                std::swap(m(pivot, j), m(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        double d = m(col, col);
        for (size_t j = 0; j < n; ++j) {
            m(col, j) /= d;
            inv(col, j) /= d;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = m(r, col);
            if (f == 0.0) continue;
            for (size_t j = 0; j < n; ++j) {
                m(r, j) -= f * m(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    if (m.cols != v.size()) throw ValidationError("matvec shape mismatch");
    std::vector<double> out(m.rows, 0.0);
    for (size_t i = 0; i < m.rows; ++i)
        for (size_t j = 0; j < m.cols; ++j) out[i] += m(i, j) * v[j];
    return out;
}

}  // namespace frontier_audit::detail
