#include "vlc/simd.hpp"

#include <cstdlib>
#include <string>

namespace vlc::simd {

#if !defined(VLC_HAVE_AVX2_KERNELS)
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#if !defined(VLC_HAVE_AVX512_KERNELS)
const KernelTable* avx512_kernels() { return nullptr; }
#endif

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::avx512:
#if defined(__x86_64__) || defined(__i386__)
            return avx512_kernels() != nullptr && __builtin_cpu_supports("avx512f") &&
                   __builtin_cpu_supports("avx512dq");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* kernels_for(Isa isa) {
    if (!cpu_supports(isa)) return nullptr;
    switch (isa) {
        case Isa::scalar:
            return &scalar_kernels();
        case Isa::avx2:
            return avx2_kernels();
        case Isa::avx512:
            return avx512_kernels();
    }
    return nullptr;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::avx512:
            return "avx512";
    }
    return "unknown";
}

namespace {

const KernelTable& select() {
    Isa cap = Isa::avx512;
    if (const char* forced = std::getenv("VLC_SIMD")) {
        const std::string name(forced);
        if (name == "scalar") cap = Isa::scalar;
        if (name == "avx2") cap = Isa::avx2;
    }
    for (Isa isa : {Isa::avx512, Isa::avx2}) {
        if (static_cast<int>(isa) > static_cast<int>(cap)) continue;
        if (const KernelTable* t = kernels_for(isa)) return *t;
    }
    return scalar_kernels();
}

}  // namespace

const KernelTable& kernels() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace vlc::simd
