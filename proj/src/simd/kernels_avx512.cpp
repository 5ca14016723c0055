// Compiled with -mavx512f -mavx512dq -mfma. Raw pointer code only, as in the
// AVX2 translation unit.

#include "vlc/simd.hpp"

#include <cstdlib>
#include <immintrin.h>

namespace vlc::simd {
namespace {

double dot_avx512(const double* x, const double* y, std::size_t n) {
    __m512d acc0 = _mm512_setzero_pd();
    __m512d acc1 = _mm512_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i), acc0);
        acc1 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i + 8), _mm512_loadu_pd(y + i + 8), acc1);
    }
    if (i + 8 <= n) {
        acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i), acc0);
        i += 8;
    }
    if (i < n) {
        const __mmask8 m = static_cast<__mmask8>((1u << (n - i)) - 1u);
        acc1 = _mm512_fmadd_pd(_mm512_maskz_loadu_pd(m, x + i), _mm512_maskz_loadu_pd(m, y + i), acc1);
    }
    return _mm512_reduce_add_pd(_mm512_add_pd(acc0, acc1));
}

void axpy_avx512(double a, const double* x, double* y, std::size_t n) {
    const __m512d va = _mm512_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm512_storeu_pd(y + i, _mm512_fmadd_pd(va, _mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i)));
    }
    if (i < n) {
        const __mmask8 m = static_cast<__mmask8>((1u << (n - i)) - 1u);
        const __m512d r = _mm512_fmadd_pd(va, _mm512_maskz_loadu_pd(m, x + i), _mm512_maskz_loadu_pd(m, y + i));
        _mm512_mask_storeu_pd(y + i, m, r);
    }
}

double squared_distance_avx512(const double* x, const double* y, std::size_t n) {
    __m512d acc = _mm512_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m512d d = _mm512_sub_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i));
        acc = _mm512_fmadd_pd(d, d, acc);
    }
    if (i < n) {
        const __mmask8 m = static_cast<__mmask8>((1u << (n - i)) - 1u);
        const __m512d d = _mm512_sub_pd(_mm512_maskz_loadu_pd(m, x + i), _mm512_maskz_loadu_pd(m, y + i));
        acc = _mm512_fmadd_pd(d, d, acc);
    }
    return _mm512_reduce_add_pd(acc);
}

std::size_t nearest_row_avx512(const double* rows, std::size_t count, std::size_t dim,
                               const double* query, double* best_d2) {
    std::size_t best = 0;
    double best_value = __builtin_inf();
    for (std::size_t r = 0; r < count; ++r) {
        const double d2 = squared_distance_avx512(rows + r * dim, query, dim);
        if (d2 < best_value) {
            best_value = d2;
            best = r;
        }
    }
    if (best_d2 != nullptr) *best_d2 = best_value;
    return best;
}

void gemv_avx512(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
                 double* out) {
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx512(matrix + r * cols, x, cols);
}

// Packed GEMM with an 8x16 register tile.
constexpr std::size_t kMr = 8;
constexpr std::size_t kNr = 16;
constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = 96;

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

#define VLC_ROW(r)                                   \
    a = _mm512_set1_pd(ap[r]);                       \
    c##r##0 = _mm512_fmadd_pd(a, b0, c##r##0);       \
    c##r##1 = _mm512_fmadd_pd(a, b1, c##r##1);

#define VLC_STORE(r)                                                            \
    _mm512_storeu_pd(c + (r) * ldc, _mm512_sub_pd(_mm512_loadu_pd(c + (r) * ldc), c##r##0)); \
    _mm512_storeu_pd(c + (r) * ldc + 8, _mm512_sub_pd(_mm512_loadu_pd(c + (r) * ldc + 8), c##r##1));

#define VLC_SPILL(r)                              \
    _mm512_storeu_pd(tile + (r) * kNr, c##r##0);  \
    _mm512_storeu_pd(tile + (r) * kNr + 8, c##r##1);

void micro_kernel(std::size_t depth, const double* ap, const double* bp, double* c,
                  std::size_t ldc, std::size_t mr, std::size_t nr) {
    __m512d c00 = _mm512_setzero_pd(), c01 = _mm512_setzero_pd();
    __m512d c10 = _mm512_setzero_pd(), c11 = _mm512_setzero_pd();
    __m512d c20 = _mm512_setzero_pd(), c21 = _mm512_setzero_pd();
    __m512d c30 = _mm512_setzero_pd(), c31 = _mm512_setzero_pd();
    __m512d c40 = _mm512_setzero_pd(), c41 = _mm512_setzero_pd();
    __m512d c50 = _mm512_setzero_pd(), c51 = _mm512_setzero_pd();
    __m512d c60 = _mm512_setzero_pd(), c61 = _mm512_setzero_pd();
    __m512d c70 = _mm512_setzero_pd(), c71 = _mm512_setzero_pd();
    for (std::size_t p = 0; p < depth; ++p) {
        const __m512d b0 = _mm512_loadu_pd(bp);
        const __m512d b1 = _mm512_loadu_pd(bp + 8);
        __m512d a;
        VLC_ROW(0)
        VLC_ROW(1)
        VLC_ROW(2)
        VLC_ROW(3)
        VLC_ROW(4)
        VLC_ROW(5)
        VLC_ROW(6)
        VLC_ROW(7)
        ap += kMr;
        bp += kNr;
    }
    if (mr == kMr && nr == kNr) {
        VLC_STORE(0)
        VLC_STORE(1)
        VLC_STORE(2)
        VLC_STORE(3)
        VLC_STORE(4)
        VLC_STORE(5)
        VLC_STORE(6)
        VLC_STORE(7)
        return;
    }
    double tile[kMr * kNr];
    VLC_SPILL(0)
    VLC_SPILL(1)
    VLC_SPILL(2)
    VLC_SPILL(3)
    VLC_SPILL(4)
    VLC_SPILL(5)
    VLC_SPILL(6)
    VLC_SPILL(7)
    for (std::size_t r = 0; r < mr; ++r)
        for (std::size_t col = 0; col < nr; ++col) c[r * ldc + col] -= tile[r * kNr + col];
}

#undef VLC_ROW
#undef VLC_STORE
#undef VLC_SPILL

void gemm_nt_sub_avx512(std::size_t m, std::size_t n, std::size_t k, const double* a,
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

// Row blocks of 8 are transposed into a column buffer so each solve step
// is one vector operation across the block.
void trsm_lt_avx512(const double* l, std::size_t ldl, std::size_t n, double* b, std::size_t ldb,
                  std::size_t m) {
    if (n == 0 || m == 0) return;
    auto* buf = static_cast<double*>(std::malloc(sizeof(double) * (n * 8 + n)));
    double* inv = buf + n * 8;
    for (std::size_t j = 0; j < n; ++j) inv[j] = 1.0 / l[j * ldl + j];
    for (std::size_t i0 = 0; i0 < m; i0 += 8) {
        const std::size_t rows = m - i0 < 8 ? m - i0 : 8;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t r = 0; r < 8; ++r) buf[p * 8 + r] = r < rows ? b[(i0 + r) * ldb + p] : 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double* lj = l + j * ldl;
            __m512d acc = _mm512_loadu_pd(buf + j * 8);
            for (std::size_t p = 0; p < j; ++p) acc = _mm512_fnmadd_pd(_mm512_set1_pd(lj[p]), _mm512_loadu_pd(buf + p * 8), acc);
            _mm512_storeu_pd(buf + j * 8, _mm512_mul_pd(acc, _mm512_set1_pd(inv[j])));
        }
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t p = 0; p < n; ++p) b[(i0 + r) * ldb + p] = buf[p * 8 + r];
    }
    std::free(buf);
}

constexpr KernelTable kAvx512{
    Isa::avx512,        dot_avx512,  axpy_avx512,        squared_distance_avx512,
    nearest_row_avx512, gemv_avx512, gemm_nt_sub_avx512, trsm_lt_avx512,
};

}  // namespace

const KernelTable* avx512_kernels() { return &kAvx512; }

}  // namespace vlc::simd
