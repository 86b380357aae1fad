#pragma once

#include <cstddef>

namespace drk::simd {

// One monomial laid out for batch evaluation over n nodes: its value at node i is
// coeff * row[0][i] * row[1][i] * ... * row[5][i] (products taken left to right).
struct TermRows {
    double coeff;
    int j;
    const double* row[6];
};

// For every term t and node i: prod = value; Neumaier-add prod into
// sum[t.j*n+i] / comp[t.j*n+i]; abssum[t.j*n+i] += |prod|.
using AccumulateFn = void (*)(const TermRows* terms, std::size_t nterms, std::size_t n, double* sum, double* comp,
                              double* abssum);

// Compensated dot product sum_i a[i]*b[i] (Dot2 with Dekker splitting).
using DotFn = double (*)(const double* a, const double* b, std::size_t n);

struct Kernels {
    AccumulateFn accumulate;
    DotFn dot;
    const char* name;
};

const Kernels& scalar_kernels();
#if defined(DRK_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif

// Runtime choice: AVX2 when the CPU supports it, unless DRK_SIMD=scalar.
const Kernels& active();
bool avx2_available();

}  // namespace drk::simd
