#pragma once

// Data-parallel inner loops used by the basis, constraint, solver and link
// simulation code. Every kernel has a portable scalar reference plus AVX2+FMA
// and AVX-512 variants; the active table is chosen once at runtime from CPUID
// and can be capped with the VLC_SIMD environment variable
// (scalar | avx2 | avx512).

#include <cstddef>
#include <string_view>

namespace vlc::simd {

enum class Isa { scalar, avx2, avx512 };

struct KernelTable {
    Isa isa;

    double (*dot)(const double* x, const double* y, std::size_t n);

    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    double (*squared_distance)(const double* x, const double* y, std::size_t n);

    // Index of the row of `rows` (count x dim, row-major) closest to `query`.
    // Ties resolve to the lowest index. The winning squared distance is
    // written to *best_d2 when non-null.
    std::size_t (*nearest_row)(const double* rows, std::size_t count, std::size_t dim,
                               const double* query, double* best_d2);

    // out[r] = dot(matrix row r, x) for a row-major rows x cols matrix.
    void (*gemv)(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
                 double* out);

    // C -= A * B^T where A is m x k (lda), B is n x k (ldb), C is m x n (ldc),
    // all row-major. This is the trailing update of the blocked Cholesky.
    void (*gemm_nt_sub)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                        std::size_t lda, const double* b, std::size_t ldb, double* c,
                        std::size_t ldc);

    // Solves X L^T = B in place, where B is m x n (ldb) and L is an n x n
    // lower triangular matrix (ldl) with nonzero diagonal.
    void (*trsm_lt)(const double* l, std::size_t ldl, std::size_t n, double* b, std::size_t ldb,
                    std::size_t m);
};

const KernelTable& scalar_kernels();

// Null when the binary was built without the corresponding code compiled in.
const KernelTable* avx2_kernels();
const KernelTable* avx512_kernels();

// Table for a specific instruction set, or null when it is unavailable on
// this build or CPU.
const KernelTable* kernels_for(Isa isa);

bool cpu_supports(Isa isa);

// Table selected for this process: the best supported ISA, capped by VLC_SIMD.
const KernelTable& kernels();

std::string_view isa_name(Isa isa);

}  // namespace vlc::simd
