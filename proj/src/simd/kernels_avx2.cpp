// Compiled with -mavx2 -mfma. Only raw pointer code lives here so that no
// inline library template is emitted with AVX encodings.

#include "vlc/simd.hpp"

#include <cstdlib>
#include <immintrin.h>

namespace vlc::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double squared_distance_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        out += d * d;
    }
    return out;
}

std::size_t nearest_row_avx2(const double* rows, std::size_t count, std::size_t dim,
                             const double* query, double* best_d2) {
    std::size_t best = 0;
    double best_value = __builtin_inf();
    for (std::size_t r = 0; r < count; ++r) {
        const double d2 = squared_distance_avx2(rows + r * dim, query, dim);
        if (d2 < best_value) {
            best_value = d2;
            best = r;
        }
    }
    if (best_d2 != nullptr) *best_d2 = best_value;
    return best;
}

void gemv_avx2(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
               double* out) {
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(matrix + r * cols, x, cols);
}

// Packed GEMM: A in 4-row slivers, B in 8-column slivers, 4x8 register tile.
constexpr std::size_t kMr = 4;
constexpr std::size_t kNr = 8;
constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = 128;

void pack_a(const double* a, std::size_t lda, std::size_t rows, std::size_t depth, double* out) {
    for (std::size_t i0 = 0; i0 < rows; i0 += kMr) {
        const std::size_t mr = rows - i0 < kMr ? rows - i0 : kMr;
        for (std::size_t p = 0; p < depth; ++p) {
            for (std::size_t r = 0; r < kMr; ++r) out[r] = r < mr ? a[(i0 + r) * lda + p] : 0.0;
            out += kMr;
        }
    }
}

void pack_b(const double* b, std::size_t ldb, std::size_t cols, std::size_t depth, double* out) {
    for (std::size_t j0 = 0; j0 < cols; j0 += kNr) {
        const std::size_t nr = cols - j0 < kNr ? cols - j0 : kNr;
        for (std::size_t p = 0; p < depth; ++p) {
            for (std::size_t c = 0; c < kNr; ++c) out[c] = c < nr ? b[(j0 + c) * ldb + p] : 0.0;
            out += kNr;
        }
    }
}

void micro_kernel(std::size_t depth, const double* ap, const double* bp, double* c,
                  std::size_t ldc, std::size_t mr, std::size_t nr) {
    __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
    __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
    __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
    __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
    for (std::size_t p = 0; p < depth; ++p) {
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        __m256d a = _mm256_broadcast_sd(ap);
        c00 = _mm256_fmadd_pd(a, b0, c00);
        c01 = _mm256_fmadd_pd(a, b1, c01);
        a = _mm256_broadcast_sd(ap + 1);
        c10 = _mm256_fmadd_pd(a, b0, c10);
        c11 = _mm256_fmadd_pd(a, b1, c11);
        a = _mm256_broadcast_sd(ap + 2);
        c20 = _mm256_fmadd_pd(a, b0, c20);
        c21 = _mm256_fmadd_pd(a, b1, c21);
        a = _mm256_broadcast_sd(ap + 3);
        c30 = _mm256_fmadd_pd(a, b0, c30);
        c31 = _mm256_fmadd_pd(a, b1, c31);
        ap += kMr;
        bp += kNr;
    }
    if (mr == kMr && nr == kNr) {
        double* row = c;
        _mm256_storeu_pd(row, _mm256_sub_pd(_mm256_loadu_pd(row), c00));
        _mm256_storeu_pd(row + 4, _mm256_sub_pd(_mm256_loadu_pd(row + 4), c01));
        row += ldc;
        _mm256_storeu_pd(row, _mm256_sub_pd(_mm256_loadu_pd(row), c10));
        _mm256_storeu_pd(row + 4, _mm256_sub_pd(_mm256_loadu_pd(row + 4), c11));
        row += ldc;
        _mm256_storeu_pd(row, _mm256_sub_pd(_mm256_loadu_pd(row), c20));
        _mm256_storeu_pd(row + 4, _mm256_sub_pd(_mm256_loadu_pd(row + 4), c21));
        row += ldc;
        _mm256_storeu_pd(row, _mm256_sub_pd(_mm256_loadu_pd(row), c30));
        _mm256_storeu_pd(row + 4, _mm256_sub_pd(_mm256_loadu_pd(row + 4), c31));
        return;
    }
    alignas(32) double tile[kMr * kNr];
    _mm256_store_pd(tile + 0, c00);
    _mm256_store_pd(tile + 4, c01);
    _mm256_store_pd(tile + 8, c10);
    _mm256_store_pd(tile + 12, c11);
    _mm256_store_pd(tile + 16, c20);
    _mm256_store_pd(tile + 20, c21);
    _mm256_store_pd(tile + 24, c30);
    _mm256_store_pd(tile + 28, c31);
    for (std::size_t r = 0; r < mr; ++r)
        for (std::size_t col = 0; col < nr; ++col) c[r * ldc + col] -= tile[r * kNr + col];
}

void gemm_nt_sub_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                      std::size_t lda, const double* b, std::size_t ldb, double* c,
                      std::size_t ldc) {
    if (m == 0 || n == 0 || k == 0) return;
    const std::size_t n_pad = (n + kNr - 1) / kNr * kNr;
    const std::size_t kc_max = k < kKc ? k : kKc;
    auto* bbuf = static_cast<double*>(std::malloc(sizeof(double) * n_pad * kc_max));
    auto* abuf = static_cast<double*>(std::malloc(sizeof(double) * kMc * kc_max));
    for (std::size_t p0 = 0; p0 < k; p0 += kKc) {
        const std::size_t kc = k - p0 < kKc ? k - p0 : kKc;
        pack_b(b + p0, ldb, n, kc, bbuf);
        for (std::size_t i0 = 0; i0 < m; i0 += kMc) {
            const std::size_t mc = m - i0 < kMc ? m - i0 : kMc;
            pack_a(a + i0 * lda + p0, lda, mc, kc, abuf);
            for (std::size_t j0 = 0; j0 < n; j0 += kNr) {
                const std::size_t nr = n - j0 < kNr ? n - j0 : kNr;
                const double* bp = bbuf + (j0 / kNr) * kc * kNr;
                for (std::size_t ii = 0; ii < mc; ii += kMr) {
                    const std::size_t mr = mc - ii < kMr ? mc - ii : kMr;
                    micro_kernel(kc, abuf + (ii / kMr) * kc * kMr, bp, c + (i0 + ii) * ldc + j0,
                                 ldc, mr, nr);
                }
            }
        }
    }
    std::free(abuf);
    std::free(bbuf);
}

// Row blocks of 4 are transposed into a column buffer so each solve step
// is one vector operation across the block.
void trsm_lt_avx2(const double* l, std::size_t ldl, std::size_t n, double* b, std::size_t ldb,
                  std::size_t m) {
    if (n == 0 || m == 0) return;
    auto* buf = static_cast<double*>(std::malloc(sizeof(double) * (n * 4 + n)));
    double* inv = buf + n * 4;
    for (std::size_t j = 0; j < n; ++j) inv[j] = 1.0 / l[j * ldl + j];
    for (std::size_t i0 = 0; i0 < m; i0 += 4) {
        const std::size_t rows = m - i0 < 4 ? m - i0 : 4;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t r = 0; r < 4; ++r) buf[p * 4 + r] = r < rows ? b[(i0 + r) * ldb + p] : 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double* lj = l + j * ldl;
            __m256d acc = _mm256_loadu_pd(buf + j * 4);
            for (std::size_t p = 0; p < j; ++p) acc = _mm256_fnmadd_pd(_mm256_set1_pd(lj[p]), _mm256_loadu_pd(buf + p * 4), acc);
            _mm256_storeu_pd(buf + j * 4, _mm256_mul_pd(acc, _mm256_set1_pd(inv[j])));
        }
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t p = 0; p < n; ++p) b[(i0 + r) * ldb + p] = buf[p * 4 + r];
    }
    std::free(buf);
}

constexpr KernelTable kAvx2{
    Isa::avx2,        dot_avx2,  axpy_avx2,        squared_distance_avx2,
    nearest_row_avx2, gemv_avx2, gemm_nt_sub_avx2, trsm_lt_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace vlc::simd
