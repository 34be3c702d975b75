#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"

namespace propkern {

using index_t = std::int64_t;

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(index_t rows, index_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(check_size(rows, cols), fill) {}

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    bool empty() const { return v_.empty(); }

    double& operator()(index_t r, index_t c) { return v_[static_cast<size_t>(r * cols_ + c)]; }
    double operator()(index_t r, index_t c) const { return v_[static_cast<size_t>(r * cols_ + c)]; }

    std::span<double> row(index_t r) { return {v_.data() + r * cols_, static_cast<size_t>(cols_)}; }
    std::span<const double> row(index_t r) const {
        return {v_.data() + r * cols_, static_cast<size_t>(cols_)};
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

private:
    static size_t check_size(index_t rows, index_t cols) {
        require(rows >= 0 && cols >= 0, "matrix dimensions must be non-negative");
        return static_cast<size_t>(rows) * static_cast<size_t>(cols);
    }

    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> v_;
};

inline void add_inplace(Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix shape mismatch in add");
    double* pa = a.data();
    const double* pb = b.data();
    for (index_t i = 0, n = a.rows() * a.cols(); i < n; ++i) pa[i] += pb[i];
}

struct Triplet {
    index_t row;
    index_t col;
    double value;
};

// Square sparse matrix in CSR form. Column indices are strictly increasing
// within each row; duplicate triplets are summed at build time.
class CsrMatrix {
public:
    CsrMatrix() = default;

    static CsrMatrix from_triplets(index_t n, std::vector<Triplet> entries) {
        require(n >= 0, "matrix size must be non-negative");
        for (const Triplet& t : entries)
            require(t.row >= 0 && t.row < n && t.col >= 0 && t.col < n,
                    "triplet index out of range");
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });

        CsrMatrix m;
        m.n_ = n;
        m.row_ptr_.assign(static_cast<size_t>(n) + 1, 0);
        for (size_t i = 0; i < entries.size();) {
            size_t j = i + 1;
            double sum = entries[i].value;
            while (j < entries.size() && entries[j].row == entries[i].row &&
                   entries[j].col == entries[i].col) {
                sum += entries[j].value;
                ++j;
            }
            m.col_.push_back(entries[i].col);
            m.val_.push_back(sum);
            ++m.row_ptr_[static_cast<size_t>(entries[i].row) + 1];
            i = j;
        }
        for (index_t r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        return m;
    }

    index_t size() const { return n_; }
    index_t nonzeros() const { return static_cast<index_t>(val_.size()); }

    const std::vector<index_t>& row_ptr() const { return row_ptr_; }
    const std::vector<index_t>& col_index() const { return col_; }
    const std::vector<double>& values() const { return val_; }

    double row_sum(index_t r) const {
        double s = 0.0;
        for (index_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) s += val_[i];
        return s;
    }

    // Dense product: this (n x n) times x (n x k).
    Matrix multiply(const Matrix& x) const {
        require(x.rows() == n_, "dimension mismatch in sparse product");
        const index_t k = x.cols();
        Matrix out(n_, k);
        for (index_t r = 0; r < n_; ++r) {
            std::span<double> dst = out.row(r);
            for (index_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) {
                const double w = val_[i];
                std::span<const double> src = x.row(col_[i]);
                for (index_t c = 0; c < k; ++c) dst[c] += w * src[c];
            }
        }
        return out;
    }

private:
    index_t n_ = 0;
    std::vector<index_t> row_ptr_{0};
    std::vector<index_t> col_;
    std::vector<double> val_;
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
inline Matrix cholesky(const Matrix& a) {
    require(a.rows() == a.cols(), "cholesky needs a square matrix");
    const index_t n = a.rows();
    Matrix l(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (index_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                require(s > 0.0, "matrix is not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

// In-place forward substitution: x <- L^{-1} x for lower-triangular L.
inline void solve_lower_inplace(const Matrix& l, std::span<double> x) {
    const index_t n = l.rows();
    require(static_cast<index_t>(x.size()) == n, "dimension mismatch in triangular solve");
    for (index_t i = 0; i < n; ++i) {
        double s = x[i];
        for (index_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
}

}  // namespace propkern
