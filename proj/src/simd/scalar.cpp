#include <cmath>

#include "drk/simd/kernels.hpp"
#include "simd_common.hpp"

namespace drk::simd {

namespace {

void accumulate_scalar(const TermRows* terms, std::size_t nterms, std::size_t n, double* sum, double* comp,
                       double* abssum) {
    for (std::size_t t = 0; t < nterms; ++t) {
        const TermRows& T = terms[t];
        double* s = sum + T.j * n;
        double* c = comp + T.j * n;
        double* a = abssum + T.j * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double prod = detail::term_product(T, i);
            detail::neumaier(s[i], c[i], prod);
            a[i] += std::fabs(prod);
        }
    }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double p = 0, s = 0;
    for (std::size_t i = 0; i < n; ++i) detail::dot2_step(p, s, a[i], b[i]);
    return p + s;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{&accumulate_scalar, &dot_scalar, "scalar"};
    return k;
}

}  // namespace drk::simd
