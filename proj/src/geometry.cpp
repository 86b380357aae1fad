#include "drk/geometry.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "drk/quadrature.hpp"

namespace drk {

SpaceParams space_params(int m, int k) {
    if (m < 2 || m % 2 != 0) throw std::invalid_argument("m must be a positive even integer");
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    return SpaceParams{m, k, (m + 2.0 * k) / 2.0, m + k + 1};
}

std::vector<double> HTypeInstance::bracket(const std::vector<double>& X, const std::vector<double>& Y) const {
    const int m = params.m;
    if (static_cast<int>(X.size()) != m || static_cast<int>(Y.size()) != m)
        throw std::invalid_argument("bracket: dimension mismatch");
    std::vector<double> out(J.size(), 0.0);
    for (std::size_t l = 0; l < J.size(); ++l) {
        double s = 0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s += J[l][i * m + j] * X[j] * Y[i];
        out[l] = s;
    }
    return out;
}

std::vector<double> HTypeInstance::apply_J(const std::vector<double>& Z, const std::vector<double>& X) const {
    const int m = params.m;
    std::vector<double> out(m, 0.0);
    for (std::size_t l = 0; l < J.size(); ++l)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) out[i] += Z[l] * J[l][i * m + j] * X[j];
    return out;
}

HTypeInstance heisenberg_instance(int d) {
    if (d < 1) throw std::invalid_argument("heisenberg: d >= 1");
    HTypeInstance h;
    h.params = space_params(2 * d, 1);
    h.name = "heisenberg:" + std::to_string(d);
    const int m = 2 * d;
    std::vector<double> J(m * m, 0.0);
    // J e_{2i} = e_{2i+1}, J e_{2i+1} = -e_{2i}
    for (int i = 0; i < d; ++i) {
        J[(2 * i + 1) * m + 2 * i] = 1.0;
        J[(2 * i) * m + 2 * i + 1] = -1.0;
    }
    h.J.push_back(J);
    return h;
}

HTypeInstance quaternionic_instance(int d) {
    if (d < 1) throw std::invalid_argument("quaternionic: d >= 1");
    HTypeInstance h;
    h.params = space_params(4 * d, 3);
    h.name = "quaternionic:" + std::to_string(d);
    const int m = 4 * d;
    // left multiplication by i, j, k on H = span(1, i, j, k)
    const int L[3][4][4] = {
        {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}},
        {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}},
        {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}},
    };
    for (int l = 0; l < 3; ++l) {
        std::vector<double> J(m * m, 0.0);
        for (int b = 0; b < d; ++b)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) J[(4 * b + i) * m + 4 * b + j] = L[l][i][j];
        h.J.push_back(J);
    }
    return h;
}

HTypeInstance abelian_instance(int m) {
    HTypeInstance h;
    h.params = space_params(m, 0);
    h.name = "abelian:" + std::to_string(m);
    return h;
}

HTypeInstance instance_by_name(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("instance must be name:d");
    const std::string kind = spec.substr(0, colon);
    const int d = std::stoi(spec.substr(colon + 1));
    if (kind == "heisenberg") return heisenberg_instance(d);
    if (kind == "quaternionic") return quaternionic_instance(d);
    if (kind == "abelian") return abelian_instance(d);
    throw std::invalid_argument("unknown instance: " + kind);
}

double htype_defect(const HTypeInstance& inst, const std::vector<double>& Z) {
    const int m = inst.params.m;
    if (inst.J.empty()) return 0.0;
    std::vector<double> JZ(m * m, 0.0);
    double z2 = 0;
    for (std::size_t l = 0; l < inst.J.size(); ++l) {
        z2 += Z[l] * Z[l];
        for (int i = 0; i < m * m; ++i) JZ[i] += Z[l] * inst.J[l][i];
    }
    double worst = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0;
            for (int l = 0; l < m; ++l) s += JZ[l * m + i] * JZ[l * m + j];
            worst = std::max(worst, std::abs(s - (i == j ? z2 : 0.0)));
            worst = std::max(worst, std::abs(JZ[i * m + j] + JZ[j * m + i]));
        }
    return worst;
}

GroupPoint identity_point(const SpaceParams& p) {
    return GroupPoint{std::vector<double>(p.m, 0.0), std::vector<double>(p.k, 0.0), 1.0};
}

GroupPoint group_product(const HTypeInstance& inst, const GroupPoint& x, const GroupPoint& y) {
    const auto& p = inst.params;
    if (static_cast<int>(x.X.size()) != p.m || static_cast<int>(y.X.size()) != p.m ||
        static_cast<int>(x.Z.size()) != p.k || static_cast<int>(y.Z.size()) != p.k)
        throw std::invalid_argument("group_product: dimension mismatch");
    if (!(x.a > 0) || !(y.a > 0)) throw std::invalid_argument("group_product: a must be positive");
    const double sa = std::sqrt(x.a);
    GroupPoint out;
    out.a = x.a * y.a;
    out.X.resize(p.m);
    for (int i = 0; i < p.m; ++i) out.X[i] = x.X[i] + sa * y.X[i];
    out.Z.resize(p.k);
    const auto br = p.k > 0 ? inst.bracket(x.X, y.X) : std::vector<double>{};
    for (int l = 0; l < p.k; ++l) out.Z[l] = x.Z[l] + x.a * y.Z[l] + 0.5 * sa * br[l];
    return out;
}

GroupPoint group_inverse(const GroupPoint& x) {
    GroupPoint out;
    const double isa = 1.0 / std::sqrt(x.a);
    out.a = 1.0 / x.a;
    for (double v : x.X) out.X.push_back(-isa * v);
    for (double v : x.Z) out.Z.push_back(-v / x.a);
    return out;
}

double distance_to_identity(const SpaceParams& p, const GroupPoint& x) {
    if (!(x.a > 0)) throw std::invalid_argument("distance: a must be positive");
    (void)p;
    double x2 = 0, z2 = 0;
    for (double v : x.X) x2 += v * v;
    for (double v : x.Z) z2 += v * v;
    const double sa = std::sqrt(x.a), isa = 1.0 / sa;
    const double c = 0.5 * (sa + isa) + isa * x2 / 8.0;
    const double W = c * c + z2 / (4.0 * x.a);
    assert(W >= 1.0 - 1e-12 && "cosh^2(r/2) below 1");
    if (!(W >= 1.0 - 1e-12)) throw std::logic_error("distance: cosh^2(r/2) < 1");
    // sinh^2(r/2) = (c-1)(c+1) + |Z|^2/(4a), with c-1 formed without cancellation
    const double sm1 = (x.a - 1.0) / (sa + 1.0);
    const double cm1 = 0.5 * sm1 * sm1 * isa + isa * x2 / 8.0;
    const double sh2 = cm1 * (c + 1.0) + z2 / (4.0 * x.a);
    return 2.0 * std::asinh(std::sqrt(sh2));
}

double distance(const HTypeInstance& inst, const GroupPoint& x, const GroupPoint& y) {
    return distance_to_identity(inst.params, group_product(inst, group_inverse(x), y));
}

double log_density_A(const SpaceParams& p, double r) {
    if (r <= 0) return -std::numeric_limits<double>::infinity();
    const double h = 0.5 * r;
    // log sinh(h) = h + log1p(-e^{-2h}) - log 2
    const double lsh = h + std::log(-std::expm1(-2.0 * h)) - std::numbers::ln2;
    const double lch = h + std::log1p(std::exp(-2.0 * h)) - std::numbers::ln2;
    return (p.m + p.k) * std::numbers::ln2 + (p.m + p.k) * lsh + p.k * lch;
}

double density_A(const SpaceParams& p, double r) {
    if (r < 0) throw std::invalid_argument("density_A: r >= 0");
    if (r == 0) return 0.0;
    return std::pow(2.0, p.m + p.k) * std::pow(std::sinh(0.5 * r), p.m + p.k) * std::pow(std::cosh(0.5 * r), p.k);
}

double density_log_derivative(const SpaceParams& p, double r) {
    const double h = 0.5 * r;
    return 0.5 * (p.m + p.k) / std::tanh(h) + 0.5 * p.k * std::tanh(h);
}

double volume_V(const SpaceParams& p, double r) {
    if (r <= 0) return 0.0;
    auto f = [&](double s) { return density_A(p, s); };
    return quad::gk_adaptive(quad::RealFn(f), 0.0, r, 0.0, 1e-13).value;
}

double modular_delta(const SpaceParams& p, const GroupPoint& x) {
    if (!(x.a > 0)) throw std::invalid_argument("modular_delta: a must be positive");
    return std::pow(x.a, -p.Q);
}

double weight_delta_q(const SpaceParams& p, double q, const GroupPoint& x) {
    if (!std::isfinite(q) || q < 2) throw std::invalid_argument("weight_delta_q: q must be finite and >= 2");
    return std::pow(modular_delta(p, x), 1.0 - q / 2.0);
}

double haar_radial_factor(const SpaceParams& p) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * p.n) / std::tgamma(0.5 * p.n);
}

NormResult lq_norm_left(const SpaceParams& p, const RadialFunction& f, double q, double rel_tol, double r_cap) {
    if (!(q >= 1) || !std::isfinite(q)) throw std::invalid_argument("lq_norm_left: q in [1, inf)");
    auto g = [&](double r) {
        if (r <= 0) return 0.0;
        const double v = std::abs(f.eval(r));
        if (v == 0) return 0.0;
        return std::exp(q * std::log(v) + log_density_A(p, r));
    };
    NormResult out;
    quad::Neumaier<double> total;
    double err = 0;
    double lo = f.r_min, width = 0.5;
    int small = 0;
    // panel contributions must shrink; a flat tail means divergence
    while (lo < r_cap) {
        const double hi = std::min(lo + width, r_cap);
        auto pr = quad::gk_adaptive(quad::RealFn(g), lo, hi, 0.0, rel_tol * 0.1);
        total.add(pr.value);
        err += pr.error;
        const double per_unit = pr.value / (hi - lo);
        small = (per_unit <= rel_tol * 1e-3 * total.value()) ? small + 1 : 0;
        lo = hi;
        if (small >= 3) {
            out.converged = true;
            break;
        }
        width = std::min(width * 1.5, 4.0);
    }
    out.r_reached = lo;
    out.value = std::pow(total.value(), 1.0 / q);
    out.error = err / std::max(total.value(), 1e-300) * out.value / q;
    return out;
}

WeightedNormPair weighted_norm_identity(const SpaceParams& p, const FactorizedGaussian& f, double q) {
    using quad::RealFn;
    const double Q = p.Q;
    const double sphere_m = 2.0 * std::pow(std::numbers::pi, 0.5 * p.m) / std::tgamma(0.5 * p.m);
    // int |g1|^q dX over R^m (radial)
    auto gx = [&](double t) { return std::exp(-q * t * t / (2 * f.sx * f.sx)) * std::pow(t, p.m - 1); };
    const double IX = sphere_m * quad::integrate_half_line(RealFn(gx), 0.0, quad::Backend::gauss_kronrod, 1e-13).value;
    double IZ = 1.0;
    if (p.k > 0) {
        const double sphere_k = 2.0 * std::pow(std::numbers::pi, 0.5 * p.k) / std::tgamma(0.5 * p.k);
        auto gz = [&](double t) { return std::exp(-q * t * t / (2 * f.sz * f.sz)) * std::pow(t, p.k - 1); };
        IZ = sphere_k * quad::integrate_half_line(RealFn(gz), 0.0, quad::Backend::gauss_kronrod, 1e-13).value;
    }
    auto g3 = [&](double a) {
        const double u = std::log(a) - f.mu;
        return std::exp(-u * u / (2 * f.sa * f.sa));
    };
    // a-integrals in u = log a, da = a du
    const double lo = f.mu - 40 * f.sa, hi = f.mu + 40 * f.sa;
    // lambda side: |a^{Q/2} g3|^q a^{-(Q+1)} da
    auto lam = [&](double u) {
        const double a = std::exp(u);
        return std::pow(std::pow(a, 0.5 * Q) * g3(a), q) * std::pow(a, -(Q + 1)) * a;
    };
    // rho side: |g3|^q delta_q a^{-1} da
    auto rho = [&](double u) {
        const double a = std::exp(u);
        const double dq = std::pow(std::pow(a, -Q), 1.0 - q / 2.0);
        return std::pow(g3(a), q) * dq / a * a;
    };
    const double Ia_l = quad::gk_adaptive(RealFn(lam), lo, hi, 0.0, 1e-13).value;
    const double Ia_r = quad::gk_adaptive(RealFn(rho), lo, hi, 0.0, 1e-13).value;
    return WeightedNormPair{std::pow(IX * IZ * Ia_l, 1.0 / q), std::pow(IX * IZ * Ia_r, 1.0 / q)};
}

}  // namespace drk
