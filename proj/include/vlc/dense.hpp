#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace vlc {

// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// In-place recursive Cholesky of a symmetric positive definite matrix. Only
// the lower triangle is read; on success it holds L with A = L L^T and the
// strict upper triangle is left unspecified. Returns false on a non-positive
// pivot. Blocks of at most `leaf` columns are factored unblocked.
bool cholesky_factor(DenseMatrix& a, std::size_t leaf = 32);

// Solves (L L^T) x = b in place.
void cholesky_solve(const DenseMatrix& factor, std::span<double> b);

}  // namespace vlc
