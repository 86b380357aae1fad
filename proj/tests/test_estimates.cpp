#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "drk/estimates.hpp"
#include "drk/quadrature.hpp"
#include "drk/spherical.hpp"

using namespace drk;
using cd = std::complex<double>;

namespace {

RadialFunction heat(const SpaceParams& p, cd tau) {
    const KernelEvaluator* ev = &evaluator_for(p);
    return RadialFunction{[ev, tau](double r) { return ev->h(tau, r, 1e-13).value; }, ev->r_min, 0.0};
}

RadialFunction gaussian(double s) {
    return RadialFunction{[s](double r) { return cd(std::exp(-r * r / (2 * s * s)), 0.0); }, 0.0, 0.0};
}

}  // namespace

TEST_CASE("upper bound sweep") {
    auto h = space_params(2, 1);
    auto rep = verify_upper_bound(h);
    CHECK(std::isfinite(rep.ratio));
    CHECK(rep.ratio > 0);
    CHECK(rep.stable);
    CHECK(rep.excluded == 0);
    REQUIRE(rep.regimes.size() == 2);
    CHECK(rep.regimes[0].points > 0);
    CHECK(rep.regimes[1].points > 0);

    UpperGrid wide;
    wide.r_max = 60;
    wide.r_steps = 60;
    CHECK(verify_upper_bound(h, wide).ratio == doctest::Approx(rep.ratio).epsilon(0.05));

    // the pure-imaginary slice is a subset of the full sweep
    UpperGrid slice;
    slice.thetas = {0.5 * std::numbers::pi};
    CHECK(verify_upper_bound(h, slice).ratio <= rep.ratio * (1 + 1e-12));

    UpperGrid bad;
    bad.r_min = 1e-5;
    CHECK_THROWS_AS(verify_upper_bound(h, bad), std::invalid_argument);
}

TEST_CASE("lower bound sweep") {
    for (auto p : {space_params(2, 1), space_params(2, 0)}) {
        auto rep = verify_lower_bound(p);
        INFO(p.k);
        CHECK(rep.ratio > 0);
        CHECK(rep.stable);
        CHECK(rep.refinement_drift <= 0.05);
        CHECK(!rep.c_scan.empty());
        CHECK(rep.smallest_c <= 4.0);
    }
    LowerGrid g;
    g.t = {20.0};
    CHECK_THROWS_AS(verify_lower_bound(space_params(2, 1), g), std::invalid_argument);
}

TEST_CASE("kernel L^q norms") {
    auto h = space_params(2, 1);
    for (cd tau : {cd(0.5, 0), cd(0, 0.3), cd(1, 1)}) {
        const double strong = lq_kernel_norm(h, tau, 4), weak = lq_kernel_norm(h, tau, 4, NormKind::weak);
        INFO(tau);
        CHECK(weak <= strong);
        const double de = lq_kernel_norm(h, tau, 4, NormKind::strong, 1e-8, quad::Backend::double_exponential);
        CHECK(de == doctest::Approx(strong).epsilon(1e-3));
    }
    // the heat kernel is radially decreasing, so the sup sits at r_min
    const double sup = lq_kernel_norm(h, 1.0, INFINITY);
    CHECK(sup == doctest::Approx(std::abs(kernel_h(h, 1.0, 1e-3).value)).epsilon(1e-9));
    CHECK_THROWS_AS(lq_kernel_norm(h, 1.0, 2.0), std::invalid_argument);

    // Gaussian L^3 against direct integration
    auto g = gaussian(1.0);
    const double direct = quad::integrate_interval(
        [&](double r) { return std::exp(-1.5 * r * r) * density_A(h, r); }, 0.0, 12.0,
        quad::Backend::gauss_kronrod, 1e-13).value;
    CHECK(lq_norm(h, g, 3.0) == doctest::Approx(std::cbrt(direct)).epsilon(1e-8));

    // |tau|^{n/2} e^{Q^2 Re tau/4} ||h_tau||_4 does not grow as |tau| -> 0 (one-sided bound;
    // on the real axis it tends to 0)
    for (double th : {0.0, 0.7, 0.5 * std::numbers::pi}) {
        auto scaled = [&](double mod) {
            const cd tau = th > 1.5 ? cd(0, mod) : std::polar(mod, th);
            return lq_kernel_norm(h, tau, 4) * std::pow(mod, 0.5 * h.n) * std::exp(0.25 * h.Q * h.Q * tau.real());
        };
        const double near = std::max(scaled(0.02), scaled(0.1)), far = std::max(scaled(0.5), scaled(1.0));
        INFO(th);
        CHECK(near <= 1.5 * far);
    }

    // observed: ||s_t||_4 decreases on [1, 100]
    double prev = INFINITY;
    for (double t : {1.0, 3.0, 10.0, 30.0, 100.0}) {
        const double v = lq_kernel_norm(h, cd(0, t), 4);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("A_q norm") {
    auto h = space_params(2, 1);
    auto k = heat(h, 1.0);
    const double a = aq_norm(h, k, 4);
    RadialFunction k3{[&](double r) { return cd(0, -3) * k.eval(r); }, k.r_min, 0};
    CHECK(aq_norm(h, k3, 4) == doctest::Approx(3 * a).epsilon(1e-8));
    CHECK(aq_norm(h, k, 4, 1e-8, quad::Backend::double_exponential) == doctest::Approx(a).epsilon(1e-3));
    // q = 2 is int |k| phi_0 A
    SphericalProfile p0(h, 0.0, 40);
    const double direct = quad::integrate_interval(
        [&](double r) { return r < k.r_min ? 0.0 : std::abs(k.eval(r)) * p0.phi(r) * density_A(h, r); }, 0.0, 40.0,
        quad::Backend::gauss_kronrod, 1e-12).value;
    CHECK(aq_norm(h, k, 2) == doctest::Approx(direct).epsilon(1e-6));
    CHECK(aq_norm(h, k, INFINITY) == doctest::Approx(std::abs(k.eval(k.r_min))).epsilon(1e-9));
    CHECK_THROWS_AS(aq_norm(h, k, 1.5), std::invalid_argument);
}

TEST_CASE("decay fits") {
    auto h = space_params(2, 1);
    auto small = decay_fit(h, 4, small_time_defaults());
    CHECK(small.slope == doctest::Approx(-2.0).epsilon(0.15 / 2));
    CHECK(small.times.size() >= 8 * std::log10(0.8 / 0.02));
    auto o = small_time_defaults();
    o.per_decade = 16;
    CHECK(std::abs(decay_fit(h, 4, o).slope - small.slope) <= 0.02);

    auto rh3 = space_params(2, 0);
    for (auto opt : {small_time_defaults(), large_time_defaults()})
        CHECK(decay_fit(rh3, INFINITY, opt).slope == doctest::Approx(-1.5).epsilon(1e-6));

    auto bad = small_time_defaults();
    bad.t_max = 3;
    CHECK_THROWS_AS(decay_fit(h, 4, bad), std::invalid_argument);
    bad = small_time_defaults();
    bad.per_decade = 4;
    CHECK_THROWS_AS(decay_fit(h, 4, bad), std::invalid_argument);
}

TEST_CASE("convolution inequality samples") {
    auto h = space_params(2, 1);
    auto k1 = heat(h, 1.0);
    auto c = convolution_check(h, k1, k1, 4);
    // h_1 * h_1 = h_2
    CHECK(c.conv_norm == doctest::Approx(lq_kernel_norm(h, 2.0, 4)).epsilon(1e-6));
    CHECK(std::isfinite(c.ratio));
    auto de = convolution_check(h, k1, k1, 4, 1e-10, quad::Backend::double_exponential);
    CHECK(de.ratio == doctest::Approx(c.ratio).epsilon(1e-3));
    auto tight = convolution_check(h, k1, k1, 4, 1e-12);
    CHECK(tight.ratio == doctest::Approx(c.ratio).epsilon(1e-6));
    auto g = convolution_check(h, gaussian(1.0), heat(h, 0.5), 4);
    CHECK(std::isfinite(g.ratio));
    CHECK(g.ratio > 0);
    CHECK_THROWS_AS(convolution_check(h, k1, k1, 2.0), std::invalid_argument);
}

TEST_CASE("weighted growth along the a-axis") {
    auto g = weighted_growth_check(space_params(2, 1), 1.0, default_growth_list());
    CHECK(g.fit.slope == doctest::Approx(1.5).epsilon(0.25 / 1.5));
    CHECK(g.max_growth > 10);
    CHECK(g.rejected == 0);
    auto r = weighted_growth_check(space_params(2, 0), 1.0, default_growth_list());
    CHECK(r.fit.slope == doctest::Approx(1.0).epsilon(0.25));
    // points inside the excluded region are dropped with a count
    auto a = default_growth_list(10, 100, 8);
    a.push_back(std::exp(-3.0));
    a.push_back(0.5);
    CHECK(weighted_growth_check(space_params(2, 1), 1.0, a).rejected == 2);
}
