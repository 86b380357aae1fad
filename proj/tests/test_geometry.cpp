#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "drk/geometry.hpp"
#include "drk/quadrature.hpp"

using namespace drk;

TEST_CASE("space params") {
    auto h = space_params(2, 1);
    CHECK(h.Q == 2.0);
    CHECK(h.n == 4);
    auto r = space_params(2, 0);
    CHECK(r.Q == 1.0);
    CHECK(r.n == 3);
    auto q = space_params(4, 3);
    CHECK(q.Q == 5.0);
    CHECK(q.n == 8);
    CHECK_THROWS(space_params(3, 1));
    CHECK_THROWS(space_params(0, 1));
    CHECK_THROWS(space_params(2, -1));
}

namespace {

GroupPoint random_point(const SpaceParams& p, std::mt19937_64& g) {
    std::normal_distribution<double> N(0.0, 1.0);
    GroupPoint x;
    for (int i = 0; i < p.m; ++i) x.X.push_back(N(g));
    for (int i = 0; i < p.k; ++i) x.Z.push_back(N(g));
    x.a = std::exp(N(g));
    return x;
}

}  // namespace

TEST_CASE("group law") {
    auto H = heisenberg_instance(1);
    GroupPoint x{{1, 0}, {0}, 1}, y{{0, 1}, {0}, 1};
    auto xy = group_product(H, x, y);
    CHECK(xy.X[0] == doctest::Approx(1));
    CHECK(xy.X[1] == doctest::Approx(1));
    CHECK(xy.Z[0] == doctest::Approx(0.5 * H.bracket({1, 0}, {0, 1})[0]));
    CHECK(std::abs(H.bracket({1, 0}, {0, 1})[0]) == doctest::Approx(1));

    std::mt19937_64 g(7);
    for (auto inst : {heisenberg_instance(1), heisenberg_instance(2), quaternionic_instance(1)}) {
        for (int t = 0; t < 20; ++t) {
            auto a = random_point(inst.params, g);
            auto e = group_product(inst, a, identity_point(inst.params));
            auto ai = group_product(inst, a, group_inverse(a));
            CHECK(e.a == doctest::Approx(a.a));
            for (int i = 0; i < inst.params.m; ++i) {
                CHECK(e.X[i] == doctest::Approx(a.X[i]));
                CHECK(std::abs(ai.X[i]) < 1e-12);
            }
            for (int i = 0; i < inst.params.k; ++i) CHECK(std::abs(ai.Z[i]) < 1e-12);
            CHECK(ai.a == doctest::Approx(1.0));
        }
    }
    CHECK_THROWS(group_product(H, x, GroupPoint{{0, 1, 2}, {0}, 1}));
}

TEST_CASE("H-type condition") {
    std::mt19937_64 g(11);
    std::normal_distribution<double> N;
    for (auto inst : {heisenberg_instance(1), heisenberg_instance(3), quaternionic_instance(1), quaternionic_instance(2)}) {
        for (int t = 0; t < 10; ++t) {
            std::vector<double> Z;
            for (int i = 0; i < inst.params.k; ++i) Z.push_back(N(g));
            CHECK(htype_defect(inst, Z) < 1e-12);
        }
    }
}

TEST_CASE("distance") {
    auto p = space_params(2, 1);
    CHECK(distance_to_identity(p, identity_point(p)) == 0.0);
    for (double a : {1e-6, 0.1, 0.5, 2.0, 37.0, 1e8}) {
        GroupPoint x{{0, 0}, {0}, a};
        CHECK(distance_to_identity(p, x) == doctest::Approx(std::abs(std::log(a))).epsilon(1e-13));
        // against the direct arccosh form
        const double c = 0.5 * (std::sqrt(a) + 1 / std::sqrt(a));
        CHECK(distance_to_identity(p, x) == doctest::Approx(2 * std::acosh(c)).epsilon(1e-9));
    }
    GroupPoint x{{2, 2}, {0}, 1};  // |X|^2 = 8
    CHECK(distance_to_identity(p, x) == doctest::Approx(2 * std::acosh(2.0)).epsilon(1e-14));
    CHECK(distance_to_identity(p, x) == doctest::Approx(2.63392).epsilon(1e-5));

    // left invariance
    auto H = heisenberg_instance(1);
    std::mt19937_64 g(3);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        auto z = random_point(p, g), a = random_point(p, g), b = random_point(p, g);
        const double d1 = distance(H, group_product(H, z, a), group_product(H, z, b));
        const double d0 = distance(H, a, b);
        worst = std::max(worst, std::abs(d1 - d0));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("density and volume") {
    auto r3 = space_params(2, 0), h = space_params(2, 1);
    CHECK(density_A(r3, 0) == 0.0);
    CHECK(density_A(r3, 2) == doctest::Approx(4 * std::pow(std::sinh(1.0), 2)));
    CHECK(density_A(r3, 2) == doctest::Approx(5.52439).epsilon(1e-5));
    CHECK(density_A(h, 1) == doctest::Approx(1.2766).epsilon(1e-4));
    CHECK(std::exp(log_density_A(h, 3.7)) == doctest::Approx(density_A(h, 3.7)).epsilon(1e-13));
    // A'/A against a finite difference
    for (double r : {0.3, 1.0, 5.0}) {
        const double d = 1e-5;
        const double fd = (log_density_A(h, r + d) - log_density_A(h, r - d)) / (2 * d);
        CHECK(density_log_derivative(h, r) == doctest::Approx(fd).epsilon(1e-8));
    }
    CHECK(volume_V(h, 0) == 0.0);
    for (auto p : {r3, h, space_params(4, 2), space_params(4, 3)}) {
        CHECK(std::log(volume_V(p, 30)) / 30 == doctest::Approx(p.Q).epsilon(0.05));
        // V ~ r^n/n: the ratio log V/log r carries a log(n)/|log r| offset, the local slope does not
        const double slope = (std::log(volume_V(p, 2e-2)) - std::log(volume_V(p, 1e-2))) / std::log(2.0);
        CHECK(slope == doctest::Approx(p.n).epsilon(0.01));
        const double ratio = std::log(volume_V(p, 1e-2)) / std::log(1e-2);
        CHECK(std::abs(ratio - p.n - std::log(double(p.n)) / std::log(1e2)) < 0.01 * p.n);
    }
}

TEST_CASE("modular function and weights") {
    auto p = space_params(2, 1);
    auto H = heisenberg_instance(1);
    CHECK(modular_delta(p, GroupPoint{{0, 0}, {0}, 1}) == 1.0);
    CHECK(modular_delta(p, GroupPoint{{0, 0}, {0}, 2}) == doctest::Approx(0.25));
    CHECK(weight_delta_q(p, 2, GroupPoint{{1, 2}, {3}, 0.3}) == 1.0);
    CHECK(weight_delta_q(p, 4, GroupPoint{{0, 0}, {0}, 2}) == doctest::Approx(4.0));
    CHECK_THROWS(weight_delta_q(p, 1.5, GroupPoint{{0, 0}, {0}, 2}));
    CHECK_THROWS(weight_delta_q(p, INFINITY, GroupPoint{{0, 0}, {0}, 2}));
    std::mt19937_64 g(5);
    for (int t = 0; t < 20; ++t) {
        auto x = random_point(p, g), y = random_point(p, g);
        CHECK(modular_delta(p, group_product(H, x, y)) ==
              doctest::Approx(modular_delta(p, x) * modular_delta(p, y)).epsilon(1e-12));
    }
}

TEST_CASE("lq_norm_left") {
    auto r3 = space_params(2, 0);
    // exp(-Qr) against 4 sinh^2(r/2) e^{-r} = e^{-r}(e^r - 2 + e^{-r}) -> not integrable; use e^{-2r}
    RadialFunction f{[](double r) { return std::exp(-2.0 * r); }, 0.0, 2.0};
    // int 4 sinh^2(r/2) e^{-2r} = int (e^{-r} - 2e^{-2r} + e^{-3r}) = 1 - 1 + 1/3
    auto n1 = lq_norm_left(r3, f, 1.0);
    CHECK(n1.converged);
    CHECK(n1.value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    RadialFunction f2{[](double r) { return std::exp(-1.0 * r); }, 0.0, 1.0};
    // e^{-Qr} with Q = 1 and q = 2: int 4 sinh^2(r/2) e^{-2r} again
    auto n2 = lq_norm_left(r3, f2, 2.0);
    CHECK(n2.converged);
    CHECK(n2.value == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-9));
    RadialFunction bad{[](double r) { return std::exp(-0.5 * r); }, 0.0, 0.5};
    CHECK_FALSE(lq_norm_left(r3, bad, 1.0).converged);
}

TEST_CASE("weighted norm identity on factorized data") {
    for (auto p : {space_params(2, 1), space_params(4, 3)})
        for (double q : {2.0, 4.0}) {
            auto w = weighted_norm_identity(p, FactorizedGaussian{0.8, 1.3, 0.4, 0.7}, q);
            CHECK(w.lhs == doctest::Approx(w.rhs).epsilon(1e-6));
        }
}

TEST_CASE("coordinate Haar measure against radial integration") {
    // HEIS: int f(r(X,Z,a)) a^{-(Q+1)} dX dZ da vs omega_{n-1} int f A dr for f = exp(-r^2)
    auto p = space_params(2, 1);
    auto f = [](double r) { return std::exp(-r * r); };
    auto radial = [&](double r) { return f(r) * density_A(p, r); };
    const double R = quad::integrate_half_line(quad::RealFn(radial), 0.0, quad::Backend::gauss_kronrod, 1e-12).value;
    // polar in X (2-D), Z symmetric, a = e^u
    auto inner_z = [&](double rho, double u) {
        auto g = [&](double z) {
            GroupPoint x{{rho, 0}, {z}, std::exp(u)};
            return f(distance_to_identity(p, x));
        };
        return 2.0 * quad::gk_adaptive(quad::RealFn(g), 0.0, 45.0 * std::exp(u * 0.5) + 1.0, 0.0, 1e-9).value;
    };
    auto inner_rho = [&](double u) {
        auto g = [&](double rho) { return 2 * std::numbers::pi * rho * inner_z(rho, u); };
        return quad::gk_adaptive(quad::RealFn(g), 0.0, 12.0 * std::exp(u * 0.25) + 8.0, 0.0, 1e-8).value;
    };
    auto outer = [&](double u) { return inner_rho(u) * std::exp(-p.Q * u); };
    const double L = quad::gk_adaptive(quad::RealFn(outer), -8.0, 8.0, 0.0, 1e-7).value;
    CHECK(L == doctest::Approx(haar_radial_factor(p) * R).epsilon(1e-5));
}
