#include <cstdlib>
#include <cstring>

#include "drk/simd/kernels.hpp"

namespace drk::simd {

bool avx2_available() {
#if defined(DRK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Kernels& active() {
    static const Kernels& chosen = []() -> const Kernels& {
        const char* env = std::getenv("DRK_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
#if defined(DRK_HAVE_AVX2)
        if (avx2_available()) return avx2_kernels();
#endif
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace drk::simd
