#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace drk {

// value = mant * exp(log_scale); keeps kernels representable far past double range.
struct Scaled {
    std::complex<double> mant{};
    double log_scale = 0.0;

    std::complex<double> value() const {
        if (mant == 0.0) return 0.0;
        return mant * std::exp(log_scale);
    }
    double log_abs() const {
        const double a = std::abs(mant);
        return a == 0 ? -std::numeric_limits<double>::infinity() : std::log(a) + log_scale;
    }
    Scaled normalized() const {
        const double a = std::abs(mant);
        if (a == 0 || !std::isfinite(a)) return *this;
        const double l = std::log(a);
        return Scaled{mant / a, log_scale + l};
    }
    Scaled operator*(const Scaled& o) const { return Scaled{mant * o.mant, log_scale + o.log_scale}.normalized(); }
    Scaled operator*(std::complex<double> c) const { return Scaled{mant * c, log_scale}.normalized(); }
    // exp(z) as a Scaled value without overflow
    static Scaled exp_of(std::complex<double> z) {
        return Scaled{std::polar(1.0, z.imag()), z.real()};
    }
};

}  // namespace drk
