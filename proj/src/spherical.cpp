#include "drk/spherical.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

#include "drk/kernels.hpp"
#include "drk/parallel.hpp"
#include "drk/quadrature.hpp"
#include "drk/simd/kernels.hpp"

namespace drk {

namespace odeint = boost::numeric::odeint;

namespace {

// g = A'/A - Q and g' with e = e^{-r}; no cancellation at either end
template <class T>
void log_derivative_minus_Q(const SpaceParams& p, T r, T& g, T& dg) {
    using std::exp;
    using std::expm1;
    const T e = exp(-r), one_m = -expm1(-r), one_p = T(1) + e;
    g = T(p.m + p.k) * e / one_m - T(p.k) * e / one_p;
    dg = -T(p.m + p.k) * e / (one_m * one_m) + T(p.k) * e / (one_p * one_p);
}

}  // namespace

SphericalProfile::SphericalProfile(const SpaceParams& p, double s, double r_max, double ode_tol)
    : p_(p), s_(s), r_max_(r_max), tol_(ode_tol) {
    if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("phi: s must be >= 0");
    if (!(r_max > 0)) throw std::invalid_argument("phi: r_max must be positive");
    if (!(ode_tol > 0)) throw std::invalid_argument("phi: ode tolerance must be positive");
    r0_ = 1e-3;
    // septic Hermite error ~ (h s)^8 / 1e7
    h_ = std::min(0.025, 0.1 / std::max(s, 1.0));
    const double Q = p.Q;
    lam_ = s * s + 0.25 * Q * Q;
    const double n = p.n;
    const double beta = (p.m + p.k) / 12.0 + p.k / 4.0;
    a2_ = -lam_ / (2 * n);
    a4_ = -a2_ * (2 * beta + lam_) / (4 * (n + 2));

    const std::size_t N = static_cast<std::size_t>(std::ceil((r_max - r0_) / h_)) + 1;
    r_max_ = r0_ + (N - 1) * h_;
    y_.resize(N);
    dy_.resize(N);
    d2y_.resize(N);
    d3y_.resize(N);

    using State = std::array<long double, 2>;
    const long double s2 = static_cast<long double>(s) * s;
    const long double QL = Q;
    long calls = 0;
    // y = e^{Qr/2} u:  y'' = -(g - Q) y' - (s^2 - Q (g - Q)/2) y
    auto rhs = [&](const State& x, State& dx, long double r) {
        long double gq = 0, dgq = 0;
        if (r < 50) log_derivative_minus_Q(p, r, gq, dgq);
        dx[0] = x[1];
        dx[1] = -gq * x[1] - (s2 - 0.5L * QL * gq) * x[0];
        ++calls;
    };
    double u0, du0;
    taylor(r0_, u0, du0);
    const long double e0 = std::exp(0.5L * QL * r0_);
    State x{e0 * u0, e0 * (du0 + 0.5L * QL * u0)};

    std::vector<long double> times(N);
    for (std::size_t i = 0; i < N; ++i) times[i] = static_cast<long double>(r0_) + static_cast<long double>(i) * h_;
    std::size_t idx = 0;
    auto obs = [&](const State& st, long double r) {
        long double gq, dgq;
        log_derivative_minus_Q(p, r, gq, dgq);
        const long double c = s2 - 0.5L * QL * gq;
        const long double y2 = -gq * st[1] - c * st[0];
        y_[idx] = static_cast<double>(st[0]);
        dy_[idx] = static_cast<double>(st[1]);
        d2y_[idx] = static_cast<double>(y2);
        d3y_[idx] = static_cast<double>(-dgq * st[1] - gq * y2 + 0.5L * QL * dgq * st[0] - c * st[1]);
        ++idx;
    };
    const long double tol = ode_tol;
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State, long double>());
    try {
        odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), static_cast<long double>(r0_) * 0.1L, obs,
                                odeint::max_step_checker(200000));
    } catch (const std::runtime_error& e) {
        throw NumericFailure(std::string("phi: ODE integration failed: ") + e.what());
    }
    if (idx != N) throw NumericFailure("phi: ODE integration stopped early");
    steps_ = calls;
}

void SphericalProfile::taylor(double r, double& u, double& du) const {
    const double r2 = r * r;
    u = 1 + a2_ * r2 + a4_ * r2 * r2;
    du = 2 * a2_ * r + 4 * a4_ * r2 * r;
}

void SphericalProfile::hermite(double r, double& y, double& dy) const {
    const double x = (r - r0_) / h_;
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= y_.size() - 1) i = y_.size() - 2;
    const double t = x - static_cast<double>(i);
    const double h = h_, h2 = h * h, h3 = h2 * h;
    // two-point septic Hermite in t with derivatives scaled by powers of h
    const double d0 = y_[i], d1 = h * dy_[i], d2 = h2 * d2y_[i], d3 = h3 * d3y_[i];
    const double e0 = y_[i + 1], e1 = h * dy_[i + 1], e2 = h2 * d2y_[i + 1], e3 = h3 * d3y_[i + 1];
    const double c2 = 0.5 * d2, c3 = d3 / 6.0;
    const double R0 = e0 - (d0 + d1 + c2 + c3), R1 = e1 - (d1 + 2 * c2 + 3 * c3), R2 = e2 - (2 * c2 + 6 * c3),
                 R3 = e3 - 6 * c3;
    const double c4 = 35 * R0 - 15 * R1 + 2.5 * R2 - R3 / 6.0;
    const double c5 = -84 * R0 + 39 * R1 - 7 * R2 + 0.5 * R3;
    const double c6 = 70 * R0 - 34 * R1 + 6.5 * R2 - 0.5 * R3;
    const double c7 = -20 * R0 + 10 * R1 - 2 * R2 + R3 / 6.0;
    y = d0 + t * (d1 + t * (c2 + t * (c3 + t * (c4 + t * (c5 + t * (c6 + t * c7))))));
    dy = (d1 + t * (2 * c2 + t * (3 * c3 + t * (4 * c4 + t * (5 * c5 + t * (6 * c6 + t * 7 * c7)))))) / h;
}

double SphericalProfile::scaled(double r) const {
    if (!(r >= 0) || r > r_max_ * (1 + 1e-14)) throw std::domain_error("phi: r outside the solved range");
    if (r < r0_) {
        double u, du;
        taylor(r, u, du);
        return std::exp(0.5 * p_.Q * r) * u;
    }
    double y, dy;
    hermite(r, y, dy);
    return y;
}

double SphericalProfile::scaled_derivative(double r) const {
    if (!(r >= 0) || r > r_max_ * (1 + 1e-14)) throw std::domain_error("phi: r outside the solved range");
    if (r < r0_) {
        double u, du;
        taylor(r, u, du);
        return std::exp(0.5 * p_.Q * r) * (du + 0.5 * p_.Q * u);
    }
    double y, dy;
    hermite(r, y, dy);
    return dy;
}

double SphericalProfile::phi(double r) const { return std::exp(-0.5 * p_.Q * r) * scaled(r); }

namespace {

using ProfileKey = std::tuple<int, int, double, double>;

struct ProfileCache {
    std::shared_mutex mu;
    std::map<ProfileKey, std::shared_ptr<const SphericalProfile>> map;
};

ProfileCache& profile_cache() {
    static ProfileCache c;
    return c;
}

}  // namespace

std::shared_ptr<const SphericalProfile> spherical_profile(const SpaceParams& p, double s, double r_max,
                                                          double ode_tol) {
    auto& c = profile_cache();
    const ProfileKey key{p.m, p.k, s, ode_tol};
    {
        std::shared_lock lk(c.mu);
        auto it = c.map.find(key);
        if (it != c.map.end() && it->second->r_max() >= r_max) return it->second;
    }
    auto prof = std::make_shared<const SphericalProfile>(p, s, r_max, ode_tol);
    std::unique_lock lk(c.mu);
    if (c.map.size() > 512) c.map.clear();
    auto& slot = c.map[key];
    if (!slot || slot->r_max() < prof->r_max()) slot = prof;
    return slot;
}

SphericalSolution phi(const SpaceParams& p, double s, const std::vector<double>& r_grid, double ode_tol) {
    if (r_grid.empty() || r_grid.front() != 0.0) throw std::invalid_argument("phi: grid must start at 0");
    SphericalSolution out;
    out.params = p;
    out.s = s;
    out.ode_tolerance = ode_tol;
    out.r = r_grid;
    out.profile = spherical_profile(p, s, *std::max_element(r_grid.begin(), r_grid.end()), ode_tol);
    out.samples.reserve(r_grid.size());
    for (double r : r_grid) out.samples.push_back(out.profile->phi(r));
    return out;
}

namespace {

CFunctionEstimate fit_c(const SphericalProfile& prof, const CFunctionOptions& opt) {
    const double s = prof.s();
    CFunctionEstimate est;
    est.s = s;
    const double step = 0.25;
    std::vector<double> rs, ys, dys;
    for (double r = opt.r_lo; r <= opt.r_hi + 1e-12; r += step) {
        rs.push_back(r);
        ys.push_back(prof.scaled(r));
        dys.push_back(prof.scaled_derivative(r));
    }
    std::vector<cplx> cp, cm;
    const cplx I(0, 1);
    const bool pairs = s >= 0.2 && s * (opt.r_hi - opt.r_lo) >= std::numbers::pi / 2;
    if (pairs) {
        for (std::size_t i = 0; i < rs.size(); ++i) {
            // partner with the best phase separation
            std::size_t best = rs.size();
            double bs = 0.5;
            for (std::size_t j = 0; j < rs.size(); ++j) {
                const double sn = std::abs(std::sin(s * (rs[j] - rs[i])));
                if (j != i && sn >= bs) {
                    bs = sn;
                    best = j;
                }
            }
            if (best == rs.size()) continue;
            const cplx e1 = std::polar(1.0, s * rs[i]), e2 = std::polar(1.0, s * rs[best]);
            const cplx det = e1 * std::conj(e2) - std::conj(e1) * e2;
            cp.push_back((ys[i] * std::conj(e2) - ys[best] * std::conj(e1)) / det);
            cm.push_back((e1 * ys[best] - e2 * ys[i]) / det);
        }
    }
    // s near a multiple of 2 pi / step aliases every pair; value/derivative pairs do not care
    if (cp.empty()) {
        if (!(s > 0)) throw std::invalid_argument("c_function: s must be positive");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const cplx e = std::polar(1.0, s * rs[i]);
            const cplx q = dys[i] / (I * s);
            cp.push_back(0.5 * (ys[i] + q) * std::conj(e));
            cm.push_back(0.5 * (ys[i] - q) * e);
        }
    }
    quad::Neumaier<cplx> ap, am;
    for (std::size_t i = 0; i < cp.size(); ++i) {
        ap.add(cp[i]);
        am.add(cm[i]);
    }
    est.c_plus = ap.value() / double(cp.size());
    est.c_minus = am.value() / double(cm.size());
    double res = 0;
    for (std::size_t i = 0; i < cp.size(); ++i) res = std::max(res, std::abs(cp[i] - est.c_plus));
    est.residual = res / std::abs(est.c_plus);
    est.pairs = static_cast<int>(cp.size());
    est.plancherel_density = 1.0 / std::norm(est.c_plus);
    est.reliable = est.residual <= opt.residual_threshold && std::isfinite(est.plancherel_density);
    return est;
}

}  // namespace

CFunctionEstimate c_function(const SpaceParams& p, double s, const CFunctionOptions& opt) {
    if (!(s > 0)) throw std::invalid_argument("c_function: s must be positive");
    if (!(opt.r_hi > opt.r_lo)) throw std::invalid_argument("c_function: empty fit window");
    auto prof = spherical_profile(p, s, opt.r_hi, opt.ode_tol);
    return fit_c(*prof, opt);
}

double plancherel_density(const SpaceParams& p, double s, double ode_tol) {
    static std::shared_mutex mu;
    static std::map<ProfileKey, double> cache;
    const ProfileKey key{p.m, p.k, s, ode_tol};
    {
        std::shared_lock lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    CFunctionOptions opt;
    opt.ode_tol = ode_tol;
    SphericalProfile prof(p, s, opt.r_hi, ode_tol);
    const double d = fit_c(prof, opt).plancherel_density;
    std::unique_lock lk(mu);
    cache[key] = d;
    return d;
}

namespace {

// log of an upper envelope for |f phi_s A| (phi_s <= phi_0 <~ (1+r) e^{-Qr/2})
double log_envelope(const SpaceParams& p, const RadialFunction& f, double r) {
    const double v = std::abs(f.eval(r));
    if (v == 0) return -INFINITY;
    return std::log(v) + log_density_A(p, r) - 0.5 * p.Q * r + std::log1p(r);
}

}  // namespace

TransformResult spherical_transform(const SpaceParams& p, const RadialFunction& f, const std::vector<double>& s,
                                    const TransformOptions& opt) {
    if (s.empty()) throw std::invalid_argument("spherical_transform: empty s list");
    for (double v : s)
        if (!(v >= 0)) throw std::invalid_argument("spherical_transform: s must be >= 0");
    TransformResult out;
    out.s = s;
    const double lo = std::max(f.r_min, 0.0);

    // truncation radius: envelope below tol * 1e-3 of its peak for three consecutive units
    double peak = -INFINITY, R = lo;
    int below = 0;
    for (double r = std::max(lo, 0.25); r <= opt.r_cap; r += 1.0) {
        const double le = log_envelope(p, f, r);
        peak = std::max(peak, le);
        below = (le < peak + std::log(opt.tol * 1e-3)) ? below + 1 : 0;
        R = r;
        if (below >= 3) break;
    }
    const bool truncated = below >= 3;
    out.r_max = R;

    const double smax = *std::max_element(s.begin(), s.end());
    std::vector<std::shared_ptr<const SphericalProfile>> prof(s.size());
    parallel_for(s.size(), [&](std::size_t i) { prof[i] = spherical_profile(p, s[i], R, opt.ode_tol); });

    // [0, lo): phi ~ 1 and f ~ f(lo)
    std::vector<cplx> head(s.size());
    if (lo > 0) {
        const cplx flo = f.eval(lo);
        const double V = volume_V(p, lo);
        for (std::size_t i = 0; i < s.size(); ++i) head[i] = flo * prof[i]->phi(lo) * V;
    }

    double width = std::min(0.5, 6.0 / (smax + 1.0));
    std::vector<cplx> prev;
    std::vector<double> scale(s.size());
    for (int level = 0; level < 5; ++level, width *= 0.5) {
        std::vector<double> x, w;
        quad::composite_gl(lo, R, width, 15, x, w);
        std::vector<double> gre(x.size()), gim(x.size());
        parallel_for(x.size(), [&](std::size_t j) {
            // f A e^{-Qr/2} times the weight; pairs with scaled profiles
            const cplx g = f.eval(x[j]) * std::exp(log_density_A(p, x[j]) - 0.5 * p.Q * x[j]) * w[j];
            gre[j] = g.real();
            gim[j] = g.imag();
        });
        std::vector<cplx> cur(s.size());
        parallel_for(s.size(), [&](std::size_t i) {
            std::vector<double> y(x.size());
            double sc = 0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                y[j] = prof[i]->scaled(x[j]);
                sc += std::abs(y[j]) * std::hypot(gre[j], gim[j]);
            }
            const auto& K = simd::active();
            cur[i] = cplx(K.dot(y.data(), gre.data(), x.size()), K.dot(y.data(), gim.data(), x.size())) + head[i];
            scale[i] = sc;
        });
        out.nodes = x.size();
        if (!prev.empty()) {
            out.error.assign(s.size(), 0.0);
            bool ok = true;
            for (std::size_t i = 0; i < s.size(); ++i) {
                // rounding floor of the sum counts as error too
                const double floor = 64 * std::numeric_limits<double>::epsilon() * scale[i];
                const double diff = std::abs(cur[i] - prev[i]);
                out.error[i] = std::max(diff, floor);
                if (diff > opt.tol * std::abs(cur[i]) + floor) ok = false;
            }
            out.value = cur;
            if (ok) {
                out.converged = truncated;
                return out;
            }
        }
        prev = cur;
    }
    out.converged = false;
    return out;
}

cplx spherical_transform(const SpaceParams& p, const RadialFunction& f, double s, const TransformOptions& opt) {
    auto r = spherical_transform(p, f, std::vector<double>{s}, opt);
    if (!r.converged) throw NumericFailure("spherical_transform: no convergence");
    return r.value[0];
}

namespace {

// density and scaled profile values at the requested radii, per spectral node
struct NodeData {
    double density;
    std::vector<double> y;
};

NodeData node_data(const SpaceParams& p, double s, const std::vector<double>& r, double ode_tol) {
    CFunctionOptions copt;
    copt.ode_tol = ode_tol;
    double rmax = copt.r_hi;
    for (double v : r) rmax = std::max(rmax, v);
    SphericalProfile prof(p, s, rmax, ode_tol);
    NodeData nd;
    nd.density = fit_c(prof, copt).plancherel_density;
    nd.y.reserve(r.size());
    for (double v : r) nd.y.push_back(prof.scaled(v));
    return nd;
}

double spectral_cutoff(const SpaceParams& p, const SpectralBatchFn& Hf, double tol, double ode_tol) {
    std::vector<double> scan;
    for (double v = 0.5; v <= 60.0; v += 0.5) scan.push_back(v);
    const auto H = Hf(scan);
    double peak = 0;
    int below = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double v = std::abs(H[i]) * plancherel_density(p, scan[i], ode_tol);
        peak = std::max(peak, v);
        below = (v < 1e-2 * tol * peak) ? below + 1 : 0;
        if (below >= 2) return scan[i];
    }
    throw NumericFailure("inverse_spherical: spectral function does not decay by s = 60");
}

}  // namespace

std::vector<cplx> inverse_spherical(const SpaceParams& p, const SphericalCalibration& cal, const SpectralBatchFn& Hf,
                                    const std::vector<double>& r, const InverseOptions& opt) {
    if (r.empty()) return {};
    for (double v : r)
        if (!(v >= 0)) throw std::invalid_argument("inverse_spherical: r must be >= 0");
    const double smax = opt.s_max > 0 ? opt.s_max : spectral_cutoff(p, Hf, opt.tol, opt.ode_tol);
    const double rmax = *std::max_element(r.begin(), r.end());
    std::vector<double> sx, sw;
    quad::composite_gl(0.0, smax, std::min(0.25, 8.0 / (rmax + 1.0)), 15, sx, sw);
    const std::vector<cplx> H = Hf(sx);
    if (H.size() != sx.size()) throw std::invalid_argument("inverse_spherical: spectral batch size mismatch");
    std::vector<std::vector<cplx>> part(sx.size());
    parallel_for(sx.size(), [&](std::size_t i) {
        const NodeData nd = node_data(p, sx[i], r, opt.ode_tol);
        const cplx W = sw[i] * H[i] * nd.density;
        part[i].resize(r.size());
        for (std::size_t j = 0; j < r.size(); ++j) part[i][j] = W * nd.y[j];
    });
    std::vector<cplx> out(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        quad::Neumaier<cplx> acc;
        for (std::size_t i = 0; i < sx.size(); ++i) acc.add(part[i][j]);
        out[j] = cal.c_S * acc.value() * std::exp(-0.5 * p.Q * r[j]);
    }
    return out;
}

std::vector<cplx> inverse_spherical(const SpaceParams& p, const SphericalCalibration& cal, const SpectralFn& Hf,
                                    const std::vector<double>& r, const InverseOptions& opt) {
    SpectralBatchFn batch = [&](const std::vector<double>& s) {
        std::vector<cplx> v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) v[i] = Hf(s[i]);
        return v;
    };
    return inverse_spherical(p, cal, batch, r, opt);
}

cplx inverse_spherical(const SpaceParams& p, const SphericalCalibration& cal, const SpectralFn& Hf, double r,
                       const InverseOptions& opt) {
    return inverse_spherical(p, cal, Hf, std::vector<double>{r}, opt)[0];
}

SphericalCalibration calibrate(const SpaceParams& p, double tau_ref, double ode_tol) {
    if (!(tau_ref > 0)) throw std::invalid_argument("calibrate: tau_ref must be positive");
    const double Q = p.Q;
    SpectralFn Hf = [&](double s) { return cplx(std::exp(-tau_ref * (0.25 * Q * Q + s * s)), 0.0); };
    // ten validation radii up to where h_tau has fallen to e^{-25} of the integrand mass;
    // beyond that double precision cannot resolve the cancellation
    const double r_top = std::min(10.0, 10.0 * std::sqrt(tau_ref));
    std::vector<double> radii{2.0};
    for (int k = 0; k < 10; ++k) radii.push_back(0.5 + (r_top - 0.5) * k / 9.0);
    SphericalCalibration unit;
    unit.c_S = 1.0;
    InverseOptions io;
    io.ode_tol = ode_tol;
    // the r = 10 check cancels ~1e-10 of the integrand mass; truncate far below that
    io.tol = 1e-22;
    const auto I = inverse_spherical(p, unit, Hf, radii, io);
    const KernelEvaluator& ev = evaluator_for(p);
    SphericalCalibration cal;
    cal.ode_tol = ode_tol;
    cal.c_S = ev.h(tau_ref, radii[0], 1e-13).value.real() / I[0].real();
    double worst = 0;
    for (std::size_t j = 1; j < radii.size(); ++j) {
        const double h = ev.h(tau_ref, radii[j], 1e-13).value.real();
        worst = std::max(worst, std::abs(cal.c_S * I[j].real() - h) / std::abs(h));
    }
    cal.reference_error = worst;
    cal.valid = worst <= 1e-4;
    if (!cal.valid)
        throw NumericFailure("calibrate: validation error " + std::to_string(worst) + " exceeds 1e-4");
    return cal;
}

const SphericalCalibration& calibration_for(const SpaceParams& p) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, SphericalCalibration> cache;
    std::lock_guard lk(mu);
    auto it = cache.find({p.m, p.k});
    if (it == cache.end()) it = cache.emplace(std::pair{p.m, p.k}, calibrate(p)).first;
    return it->second;
}

SpectralBasis::SpectralBasis(const SpaceParams& p, double s_max, double r_max, double ode_tol)
    : p_(p), ode_tol_(ode_tol) {
    if (!(s_max > 0) || !(r_max > 0)) throw std::invalid_argument("SpectralBasis: s_max, r_max must be positive");
    cS_ = calibration_for(p).c_S;
    quad::composite_gl(0.0, s_max, std::min(0.25, 8.0 / (r_max + 1.0)), 15, s_, ws_);
    quad::composite_gl(0.0, r_max, std::min(0.5, 6.0 / (s_max + 1.0)), 15, r_, wr_);
    At_.resize(r_.size());
    for (std::size_t j = 0; j < r_.size(); ++j) At_[j] = std::exp(log_density_A(p, r_[j]) - p.Q * r_[j]);
    dens_.resize(s_.size());
    Y_.resize(s_.size() * r_.size());
    parallel_for(s_.size(), [&](std::size_t i) {
        const NodeData nd = node_data(p, s_[i], r_, ode_tol);
        dens_[i] = nd.density;
        std::memcpy(&Y_[i * r_.size()], nd.y.data(), r_.size() * sizeof(double));
    });
}

std::vector<cplx> SpectralBasis::forward(const std::vector<cplx>& ft) const {
    if (ft.size() != r_.size()) throw std::invalid_argument("SpectralBasis::forward: size mismatch");
    std::vector<double> gre(r_.size()), gim(r_.size());
    for (std::size_t j = 0; j < r_.size(); ++j) {
        const cplx g = ft[j] * (wr_[j] * At_[j]);
        gre[j] = g.real();
        gim[j] = g.imag();
    }
    std::vector<cplx> F(s_.size());
    const auto& K = simd::active();
    parallel_for(s_.size(), [&](std::size_t i) {
        const double* y = &Y_[i * r_.size()];
        F[i] = cplx(K.dot(y, gre.data(), r_.size()), K.dot(y, gim.data(), r_.size()));
    });
    return F;
}

std::vector<cplx> SpectralBasis::inverse(const std::vector<cplx>& Hf) const {
    if (Hf.size() != s_.size()) throw std::invalid_argument("SpectralBasis::inverse: size mismatch");
    std::vector<double> gre(s_.size()), gim(s_.size());
    for (std::size_t i = 0; i < s_.size(); ++i) {
        const cplx g = Hf[i] * (ws_[i] * dens_[i] * cS_);
        gre[i] = g.real();
        gim[i] = g.imag();
    }
    std::vector<cplx> u(r_.size());
    const std::size_t nr = r_.size();
    parallel_for(nr, [&](std::size_t j) {
        quad::Neumaier<double> re, im;
        for (std::size_t i = 0; i < s_.size(); ++i) {
            const double y = Y_[i * nr + j];
            re.add(y * gre[i]);
            im.add(y * gim[i]);
        }
        u[j] = cplx(re.value(), im.value());
    });
    return u;
}

SpectralBasis::Table SpectralBasis::tabulate(const std::vector<double>& r) const {
    Table t;
    t.r = r;
    t.Y.resize(s_.size() * r.size());
    if (r.empty()) return t;
    const double rmax = *std::max_element(r.begin(), r.end());
    parallel_for(s_.size(), [&](std::size_t i) {
        SphericalProfile prof(p_, s_[i], std::max(rmax, 1.0), ode_tol_);
        for (std::size_t j = 0; j < r.size(); ++j) t.Y[i * r.size() + j] = prof.scaled(r[j]);
    });
    return t;
}

std::vector<cplx> SpectralBasis::inverse(const Table& t, const std::vector<cplx>& Hf) const {
    if (Hf.size() != s_.size()) throw std::invalid_argument("SpectralBasis::inverse: size mismatch");
    const std::size_t nr = t.r.size();
    std::vector<cplx> g(s_.size());
    for (std::size_t i = 0; i < s_.size(); ++i) g[i] = Hf[i] * (ws_[i] * dens_[i] * cS_);
    std::vector<cplx> u(nr);
    parallel_for(nr, [&](std::size_t j) {
        quad::Neumaier<double> re, im;
        for (std::size_t i = 0; i < s_.size(); ++i) {
            const double y = t.Y[i * nr + j];
            re.add(y * g[i].real());
            im.add(y * g[i].imag());
        }
        u[j] = cplx(re.value(), im.value());
    });
    return u;
}

std::vector<cplx> SpectralBasis::inverse_at(const std::vector<cplx>& Hf, const std::vector<double>& r) const {
    if (Hf.size() != s_.size()) throw std::invalid_argument("SpectralBasis::inverse_at: size mismatch");
    return inverse(tabulate(r), Hf);
}

double SpectralBasis::l2_norm(const std::vector<cplx>& ft) const {
    quad::Neumaier<double> acc;
    for (std::size_t j = 0; j < r_.size(); ++j) acc.add(wr_[j] * At_[j] * std::norm(ft[j]));
    return std::sqrt(acc.value());
}

}  // namespace drk
