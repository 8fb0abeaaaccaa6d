#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace plsh {

// Dense matrices larger than this edge length are refused; callers that need
// bigger contexts use the on-demand entry accessors instead.
inline constexpr std::int64_t kDenseSizeCap = 8192;

// Row-major dense matrix of 64-bit reals.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::int64_t rows, std::int64_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("DenseMatrix: negative dimension");
    }

    static DenseMatrix identity(std::int64_t n) {
        DenseMatrix m(n, n, 0.0);
        for (std::int64_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix ones(std::int64_t rows, std::int64_t cols) {
        return DenseMatrix(rows, cols, 1.0);
    }

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }

    double& operator()(std::int64_t i, std::int64_t j) {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(std::int64_t i, std::int64_t j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    double* row(std::int64_t i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row(std::int64_t i) const {
        return data_.data() + static_cast<std::size_t>(i) * cols_;
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const DenseMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<double> data_;
};

inline double max_abs(const DenseMatrix& m) {
    double best = 0.0;
    for (double v : m.data()) best = std::max(best, std::abs(v));
    return best;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
    return best;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols(), 0.0);
    for (std::int64_t i = 0; i < a.rows(); ++i) {
        for (std::int64_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* crow = c.row(i);
            for (std::int64_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

}  // namespace plsh
