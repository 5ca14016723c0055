#include "vlc/dense.hpp"

#include <algorithm>
#include <cmath>

#include "vlc/simd.hpp"

namespace vlc {

namespace {

// Unblocked factorization of the n x n leading block at `a`.
bool cholesky_leaf(double* a, std::size_t n, std::size_t ld, const simd::KernelTable& k) {
    for (std::size_t j = 0; j < n; ++j) {
        const double* rj = a + j * ld;
        const double d = rj[j] - k.dot(rj, rj, j);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a[j * ld + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double* ri = a + i * ld;
            ri[j] = (ri[j] - k.dot(ri, rj, j)) / ljj;
        }
    }
    return true;
}

// Solves X L^T = B in place for the m x n block B, with L lower triangular n x n.
void trsm_right_lower_t(const double* l, std::size_t n, double* b, std::size_t m, std::size_t ld,
                        std::size_t leaf, const simd::KernelTable& k) {
    if (n <= leaf) {
        k.trsm_lt(l, ld, n, b, ld, m);
        return;
    }
    const std::size_t n1 = n / 2;
    trsm_right_lower_t(l, n1, b, m, ld, leaf, k);
    k.gemm_nt_sub(m, n - n1, n1, b, ld, l + n1 * ld, ld, b + n1, ld);
    trsm_right_lower_t(l + n1 * ld + n1, n - n1, b + n1, m, ld, leaf, k);
}

// C -= A A^T on the lower triangle (block-trapezoidal) of the n x n block C,
// with A n x depth.
void syrk_lower_sub(const double* a, std::size_t n, std::size_t depth, double* c, std::size_t ld,
                    std::size_t leaf, const simd::KernelTable& k) {
    for (std::size_t ib = 0; ib < n; ib += leaf) {
        const std::size_t m = std::min(leaf, n - ib);
        k.gemm_nt_sub(m, ib + m, depth, a + ib * ld, ld, a, ld, c + ib * ld, ld);
    }
}

bool cholesky_recursive(double* a, std::size_t n, std::size_t ld, std::size_t leaf,
                        const simd::KernelTable& k) {
    if (n <= leaf) return cholesky_leaf(a, n, ld, k);
    const std::size_t n1 = n / 2;
    const std::size_t n2 = n - n1;
    if (!cholesky_recursive(a, n1, ld, leaf, k)) return false;
    double* a21 = a + n1 * ld;
    trsm_right_lower_t(a, n1, a21, n2, ld, leaf, k);
    syrk_lower_sub(a21, n2, n1, a21 + n1, ld, std::max<std::size_t>(leaf, 64), k);
    return cholesky_recursive(a21 + n1, n2, ld, leaf, k);
}

}  // namespace

bool cholesky_factor(DenseMatrix& a, std::size_t leaf) {
    if (a.rows() != a.cols()) return false;
    return cholesky_recursive(a.row(0), a.rows(), a.cols(), std::max<std::size_t>(leaf, 1),
                              simd::kernels());
}

void cholesky_solve(const DenseMatrix& factor, std::span<double> b) {
    const std::size_t n = factor.rows();
    const auto& k = simd::kernels();
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = (b[i] - k.dot(factor.row(i), b.data(), i)) / factor(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        b[i] /= factor(i, i);
        k.axpy(-b[i], factor.row(i), b.data(), i);
    }
}

}  // namespace vlc
