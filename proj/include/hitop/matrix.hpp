#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hitop/errors.hpp"

namespace hitop {

// Dense row-major matrix of doubles. Small on purpose: the simulator works
// on hardware-sized tiles, not HPC-scale operands.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 0.0); }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    // Copy of the sub-block [r0,r1) x [c0,c1).
    Matrix block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
        if (r1 < r0 || c1 < c0 || r1 > rows_ || c1 > cols_)
            throw InternalError("matrix block out of range");
        Matrix out(r1 - r0, c1 - c0);
        for (std::size_t i = r0; i < r1; ++i)
            for (std::size_t j = c0; j < c1; ++j)
                out(i - r0, j - c0) = (*this)(i, j);
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double max_abs(const Matrix& m) {
    double v = 0.0;
    for (double x : m.values()) v = std::max(v, std::fabs(x));
    return v;
}

inline bool all_finite(const Matrix& m) {
    for (double x : m.values())
        if (!std::isfinite(x)) return false;
    return true;
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double x : m.values()) s += x * x;
    return std::sqrt(s);
}

// ||a - b||_F / ||b||_F, with the convention 0/0 = 0.
inline double relative_frobenius_error(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DataError("relative_frobenius_error: shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.values()[i] - b.values()[i];
        num += d * d;
        den += b.values()[i] * b.values()[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

} // namespace hitop
