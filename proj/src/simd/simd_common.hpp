#pragma once
#ifdef __FAST_MATH__
#error "compensated kernels must not be built with -ffast-math"
#endif

#include <cmath>

#include "drk/simd/kernels.hpp"

namespace drk::simd::detail {

inline double term_product(const TermRows& T, std::size_t i) {
    return T.coeff * T.row[0][i] * T.row[1][i] * T.row[2][i] * T.row[3][i] * T.row[4][i] * T.row[5][i];
}

inline void neumaier(double& s, double& c, double x) {
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x))
        c += (s - t) + x;
    else
        c += (x - t) + s;
    s = t;
}

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double z = s - a;
    e = (a - (s - z)) + (b - z);
}

inline void split(double a, double& hi, double& lo) {
    const double c = 134217729.0 * a;
    hi = c - (c - a);
    lo = a - hi;
}

inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    double ah, al, bh, bl;
    split(a, ah, al);
    split(b, bh, bl);
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
}

inline void dot2_step(double& p, double& s, double a, double b) {
    double h, r, q;
    two_prod(a, b, h, r);
    two_sum(p, h, p, q);
    s += q + r;
}

}  // namespace drk::simd::detail
