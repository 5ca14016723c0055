#include "vlc/simd.hpp"

#include <limits>

namespace vlc::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double squared_distance_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

std::size_t nearest_row_scalar(const double* rows, std::size_t count, std::size_t dim,
                               const double* query, double* best_d2) {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < count; ++r) {
        const double d2 = squared_distance_scalar(rows + r * dim, query, dim);
        if (d2 < best_value) {
            best_value = d2;
            best = r;
        }
    }
    if (best_d2 != nullptr) *best_d2 = best_value;
    return best;
}

void gemv_scalar(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
                 double* out) {
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(matrix + r * cols, x, cols);
}

void gemm_nt_sub_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                        std::size_t lda, const double* b, std::size_t ldb, double* c,
                        std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * lda;
        double* ci = c + i * ldc;
        for (std::size_t j = 0; j < n; ++j) ci[j] -= dot_scalar(ai, b + j * ldb, k);
    }
}

void trsm_lt_scalar(const double* l, std::size_t ldl, std::size_t n, double* b, std::size_t ldb,
                    std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
        double* bi = b + i * ldb;
        for (std::size_t j = 0; j < n; ++j) bi[j] = (bi[j] - dot_scalar(bi, l + j * ldl, j)) / l[j * ldl + j];
    }
}

constexpr KernelTable kScalar{
    Isa::scalar,     dot_scalar,  axpy_scalar,       squared_distance_scalar,
    nearest_row_scalar, gemv_scalar, gemm_nt_sub_scalar, trsm_lt_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace vlc::simd
