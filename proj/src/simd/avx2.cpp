// Compiled with -mavx2 only (no FMA) so products round exactly like the scalar path.
#include <immintrin.h>

#include "drk/simd/kernels.hpp"
#include "simd_common.hpp"

namespace drk::simd {

namespace {

inline __m256d vabs(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

void accumulate_avx2(const TermRows* terms, std::size_t nterms, std::size_t n, double* sum, double* comp,
                     double* abssum) {
    for (std::size_t t = 0; t < nterms; ++t) {
        const TermRows& T = terms[t];
        double* s = sum + T.j * n;
        double* c = comp + T.j * n;
        double* a = abssum + T.j * n;
        const __m256d coeff = _mm256_set1_pd(T.coeff);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            __m256d prod = _mm256_mul_pd(coeff, _mm256_loadu_pd(T.row[0] + i));
            prod = _mm256_mul_pd(prod, _mm256_loadu_pd(T.row[1] + i));
            prod = _mm256_mul_pd(prod, _mm256_loadu_pd(T.row[2] + i));
            prod = _mm256_mul_pd(prod, _mm256_loadu_pd(T.row[3] + i));
            prod = _mm256_mul_pd(prod, _mm256_loadu_pd(T.row[4] + i));
            prod = _mm256_mul_pd(prod, _mm256_loadu_pd(T.row[5] + i));
            const __m256d sv = _mm256_loadu_pd(s + i);
            const __m256d tv = _mm256_add_pd(sv, prod);
            const __m256d big_s = _mm256_cmp_pd(vabs(sv), vabs(prod), _CMP_GE_OQ);
            const __m256d c_s = _mm256_add_pd(_mm256_sub_pd(sv, tv), prod);
            const __m256d c_x = _mm256_add_pd(_mm256_sub_pd(prod, tv), sv);
            const __m256d corr = _mm256_blendv_pd(c_x, c_s, big_s);
            _mm256_storeu_pd(c + i, _mm256_add_pd(_mm256_loadu_pd(c + i), corr));
            _mm256_storeu_pd(s + i, tv);
            _mm256_storeu_pd(a + i, _mm256_add_pd(_mm256_loadu_pd(a + i), vabs(prod)));
        }
        for (; i < n; ++i) {
            const double prod = detail::term_product(T, i);
            detail::neumaier(s[i], c[i], prod);
            a[i] += std::fabs(prod);
        }
    }
}

inline void split4(__m256d a, __m256d& hi, __m256d& lo) {
    const __m256d c = _mm256_mul_pd(_mm256_set1_pd(134217729.0), a);
    hi = _mm256_sub_pd(c, _mm256_sub_pd(c, a));
    lo = _mm256_sub_pd(a, hi);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d p = _mm256_setzero_pd(), s = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(a + i), y = _mm256_loadu_pd(b + i);
        const __m256d h = _mm256_mul_pd(x, y);
        __m256d xh, xl, yh, yl;
        split4(x, xh, xl);
        split4(y, yh, yl);
        const __m256d r = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(xh, yh), h), _mm256_mul_pd(xh, yl)),
                          _mm256_mul_pd(xl, yh)),
            _mm256_mul_pd(xl, yl));
        const __m256d np = _mm256_add_pd(p, h);
        const __m256d z = _mm256_sub_pd(np, p);
        const __m256d q = _mm256_add_pd(_mm256_sub_pd(p, _mm256_sub_pd(np, z)), _mm256_sub_pd(h, z));
        p = np;
        s = _mm256_add_pd(s, _mm256_add_pd(q, r));
    }
    alignas(32) double pl[4], sl[4];
    _mm256_store_pd(pl, p);
    _mm256_store_pd(sl, s);
    double P = pl[0], S = sl[0];
    for (int l = 1; l < 4; ++l) {
        double q;
        detail::two_sum(P, pl[l], P, q);
        S += q + sl[l];
    }
    for (; i < n; ++i) detail::dot2_step(P, S, a[i], b[i]);
    return P + S;
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{&accumulate_avx2, &dot_avx2, "avx2"};
    return k;
}

}  // namespace drk::simd
