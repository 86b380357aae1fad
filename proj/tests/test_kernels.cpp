#include <chrono>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "drk/kernels.hpp"
#include "drk/quadrature.hpp"

using namespace drk;
using cd = std::complex<double>;

namespace {

struct Ref {
    int m, k;
    cd tau;
    double r;
    cd value;
};

// 30-digit references from direct arbitrary-precision integration of the defining formula;
// the oscillatory ones use the substitution cosh s - cosh r = w^2 so the endpoint is smooth
const Ref kRefs[] = {
    {2, 1, {1, 0}, 0.5, {0.042378605970757949, 0}},
    {2, 1, {1, 0}, 2, {0.010880085898198014, 0}},
    {2, 1, {1, 0}, 5, {9.7409154291263631e-6, 0}},
    {2, 1, {1, 1}, 2, {-0.004103011712241638, -0.0079457281871667852}},
    {2, 1, {0.5, 0}, 1, {0.16357945012463376, 0}},
    {4, 3, {1, 0}, 2, {5.5165814206986126e-7, 0}},
    {2, 1, {0, 0.5}, 3, {0.12455108509595062, 0.1467795368494026}},
    {2, 1, {0, 1}, 1, {-0.080659236545288152, 0.073816151870630798}},
    {4, 3, {0, 0.3}, 2, {-0.0064745876883976721, 0.047951019209633613}},
    {2, 0, {1, 0}, 1, {0.16417259794154996, 0}},
    {4, 2, {0.5, 0.5}, 1.5, {-0.00061335562025381733, 0.00066944653303033604}},
};

}  // namespace

TEST_CASE("kernel values against high-precision references") {
    for (const auto& R : kRefs) {
        auto kv = kernel_h(space_params(R.m, R.k), ComplexTime(R.tau), R.r);
        INFO(R.m, R.k, R.tau, R.r, kv.value, kv.quad_error, kv.cells);
        CHECK(kv.converged);
        CHECK(std::abs(kv.value - R.value) <= 1e-10 * std::abs(R.value));
        CHECK(kv.method == (R.k % 2 ? KernelMethod::odd_quadrature : KernelMethod::even_closed_form));
    }
}

TEST_CASE("RH3 closed form") {
    auto p = space_params(2, 0);
    // C (4 pi)^{-1/2} e^{-1/4} (1/(2 sinh 0.5)) e^{-1/4}
    const double want = kernel_constant(p) / std::sqrt(4 * M_PI) * std::exp(-0.25) / (2 * std::sinh(0.5)) * std::exp(-0.25);
    CHECK(kernel_h(p, 1.0, 1.0).value.real() == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("unit mass") {
    for (auto p : {space_params(2, 0), space_params(2, 1), space_params(4, 2), space_params(4, 3)}) {
        auto f = [&](double r) {
            if (r < 1e-3) return 0.0;
            return kernel_h(p, 1.0, r).value.real() * density_A(p, r);
        };
        const double m = quad::integrate_interval(quad::RealFn(f), 1e-3, 30, quad::Backend::gauss_kronrod, 1e-11).value;
        INFO(p.m, p.k);
        CHECK(m == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("conjugation, positivity, domain") {
    for (auto p : {space_params(2, 1), space_params(4, 2)})
        for (cd tau : {cd(0.7, 0.4), cd(0, 1.3), cd(2, -0.5)})
            for (double r : {0.2, 1.0, 4.0}) {
                auto a = kernel_h(p, tau, r), b = kernel_h(p, std::conj(tau), r);
                CHECK(std::abs(b.value - std::conj(a.value)) <= 1e-12 * std::abs(a.value));
            }
    auto h = space_params(2, 1);
    for (double tau : {0.5, 1.0, 2.0})
        for (double r = 0.1; r <= 10; r += 0.7) {
            auto v = kernel_h(h, tau, r).value;
            CHECK(v.real() > 0);
            CHECK(std::abs(v.imag()) <= 1e-14 * v.real());
        }
    CHECK_THROWS(ComplexTime(cd(-0.1, 1)));
    CHECK_THROWS(ComplexTime(cd(0, 0)));
    CHECK_THROWS_AS(kernel_h(h, 1.0, 1e-4), std::domain_error);
    auto s1 = schrodinger_kernel(h, 0.8, 2.0).value, s2 = schrodinger_kernel(h, -0.8, 2.0).value;
    CHECK(std::abs(s2 - std::conj(s1)) <= 1e-11 * std::abs(s1));
}

TEST_CASE("odd integral self-convergence") {
    auto p = space_params(2, 1);
    auto a = odd_k_integral(p, cd(0, 0.5), 3.0, 1e-8);
    auto b = odd_k_integral(p, cd(0, 0.5), 3.0, 0.5e-8);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(b.rel_error <= a.rel_error * 1.0 + 1e-15);
    CHECK(std::abs(a.value.value() - b.value.value()) <= 1e-4 * std::abs(b.value.value()));
}

TEST_CASE("hard corner: small imaginary time and large radius") {
    auto p = space_params(2, 1);
    const auto t0 = std::chrono::steady_clock::now();
    for (double t : {0.01, 0.05}) {
        for (double r : {5.0, 30.0}) {
            auto kv = schrodinger_kernel(p, t, r);
            INFO(t, r, kv.quad_error, kv.cells);
            CHECK(std::isfinite(kv.scaled.log_abs()));
            CHECK(kv.quad_error < 1e-6);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 30);
}

TEST_CASE("envelopes") {
    auto p = space_params(2, 1);
    auto e = upper_bound_envelope(p, 1.0, 10.0);
    CHECK(e.regime == Regime::small);
    CHECK(e.log_value == doctest::Approx(1.5 * std::log(11.0) - 10 - 1 - 25));
    CHECK(upper_bound_envelope(p, 3.0, 2.0).regime == Regime::small);
    CHECK(upper_bound_envelope(p, 3.0 + 1e-12, 2.0).regime == Regime::large);
    // pure imaginary: no Gaussian factor
    auto ei = upper_bound_envelope(p, cd(0, 0.5), 4.0);
    CHECK(ei.log_value == doctest::Approx(-2 * std::log(0.5) + 1.5 * std::log(5.0) - 4.0));
    CHECK(lower_bound_envelope(p, 1.0, 10.0) == doctest::Approx(std::pow(10.0, 1.5) * std::exp(-10.0)));
    CHECK_THROWS_AS(lower_bound_envelope(p, 1.0, 4.5), std::domain_error);
}

TEST_CASE("sigma kernel") {
    auto p = space_params(2, 1);
    const double t = 0.7;
    GroupPoint x{{0.3, -0.2}, {0.4}, 1.0};
    const double r = distance_to_identity(p, x);
    CHECK(std::abs(sigma_kernel(p, t, x)) == doctest::Approx(std::abs(schrodinger_kernel(p, t, r).value)));
    GroupPoint y{{0, 0}, {0}, 0.05};
    const double ry = std::log(1 / 0.05);
    CHECK(std::abs(sigma_kernel(p, t, y)) ==
          doctest::Approx(std::pow(0.05, -p.Q / 2) * std::abs(schrodinger_kernel(p, t, ry).value)).epsilon(1e-12));
    // growth along the slice beyond the excluded region
    double prev = 0;
    for (double L : {8.0, 16.0, 32.0, 64.0}) {
        GroupPoint z{{0, 0}, {0}, std::exp(-L)};
        const double v = sigma_kernel_scaled(p, 1.0, z).log_abs();
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("heat equation residual") {
    for (auto p : {space_params(2, 0), space_params(2, 1)}) {
        const auto& ev = evaluator_for(p);
        for (double tau : {0.5, 1.0, 2.0})
            for (double r : {0.5, 2.0, 7.0}) {
                const double h = 1e-3;
                auto H = [&](double tt, double rr) { return ev.h(tt, rr, 1e-13).value.real(); };
                // 5-point stencils; the 3-point ones lose 1e-2 at r = 7 where the Gaussian is steep
                const double dt = (-H(tau + 2 * h, r) + 8 * H(tau + h, r) - 8 * H(tau - h, r) + H(tau - 2 * h, r)) / (12 * h);
                const double d1 = (-H(tau, r + 2 * h) + 8 * H(tau, r + h) - 8 * H(tau, r - h) + H(tau, r - 2 * h)) / (12 * h);
                const double d2 = (-H(tau, r + 2 * h) + 16 * H(tau, r + h) - 30 * H(tau, r) + 16 * H(tau, r - h) -
                                   H(tau, r - 2 * h)) /
                                  (12 * h * h);
                const double res = dt - d2 - density_log_derivative(p, r) * d1;
                INFO(p.k, tau, r);
                CHECK(std::abs(res) <= 1e-4 * std::abs(H(tau, r)));
            }
    }
}
