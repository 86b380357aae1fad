#include "drk/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include "drk/parallel.hpp"
#include "drk/spherical.hpp"

namespace drk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using LogFn = std::function<double(double)>;  // r -> log|f(r)|

LogFn log_abs_of(const RadialFunction& f) {
    return [&f](double r) {
        const double a = std::abs(f.eval(r));
        return a > 0 ? std::log(a) : kNegInf;
    };
}

LogFn log_abs_kernel(const SpaceParams& p, cplx tau, double tol) {
    const KernelEvaluator* ev = &evaluator_for(p);
    return [ev, tau, tol](double r) { return ev->h(tau, r, tol).scaled.log_abs(); };
}

// First integer step past r_lo where the log-integrand has fallen 40 + log(1/tol) below its
// running max and kept falling; capped at 400.
double tail_cut(const LogFn& lg, double r_lo, double tol) {
    double top = kNegInf, prev = kNegInf;
    int falling = 0;
    const double drop = 40.0 + std::log(1.0 / tol);
    for (double r = std::max(r_lo, 0.5); r < 400.0; r += 1.0) {
        const double v = lg(r);
        top = std::max(top, v);
        falling = v < prev ? falling + 1 : 0;
        prev = v;
        if (falling >= 3 && v < top - drop) return r;
    }
    return 400.0;
}

// int_{r_lo}^{R} exp(lg(r)) dr for a nonnegative integrand given in log form.
double integrate_log(const LogFn& lg, double r_lo, double R, double tol, quad::Backend backend) {
    auto g = [&](double r) {
        const double v = lg(r);
        return v == kNegInf ? 0.0 : std::exp(v);
    };
    if (backend == quad::Backend::gauss_kronrod) {
        // unit panels keep the adaptive bisection local
        quad::Neumaier<double> acc;
        for (double lo = r_lo; lo < R; lo += 1.0) {
            const double hi = std::min(lo + 1.0, R);
            acc.add(quad::gk_adaptive(quad::RealFn(g), lo, hi, 0.0, tol * 0.1).value);
        }
        return acc.value();
    }
    boost::math::quadrature::tanh_sinh<double> ts(12);
    quad::Neumaier<double> acc;
    for (double lo = r_lo; lo < R; lo += 4.0) {
        const double hi = std::min(lo + 4.0, R);
        acc.add(ts.integrate(g, lo, hi, std::max(tol, 1e-14)));
    }
    return acc.value();
}

// sup_r lg(r) + w(r) on [r_lo, R]: dense scan, then Brent around the best sample.
double sup_log(const LogFn& lg, const std::function<double(double)>& w, double r_lo, double R) {
    std::vector<double> rs;
    for (int i = 0; i <= 40; ++i) {
        const double r = r_lo * std::pow(1.0 / r_lo, i / 40.0);
        if (r < 1.0) rs.push_back(r);
    }
    for (double r = std::max(1.0, r_lo); r <= R; r += 0.05) rs.push_back(r);
    std::vector<double> v(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) v[i] = lg(rs[i]) + w(rs[i]);
    const std::size_t b = std::max_element(v.begin(), v.end()) - v.begin();
    double best = v[b];
    if (b > 0 && b + 1 < rs.size()) {
        auto neg = [&](double r) { return -(lg(r) + w(r)); };
        auto res = boost::math::tools::brent_find_minima(neg, rs[b - 1], rs[b + 1], 40);
        best = std::max(best, -res.second);
    }
    return best;
}

double lq_from_log(const SpaceParams& p, const LogFn& lg, double r_lo, double q, NormKind kind, double tol,
                   quad::Backend backend) {
    if (!(q >= 1)) throw std::invalid_argument("lq norm: q >= 1");
    if (std::isinf(q)) {
        const double R = tail_cut(lg, r_lo, tol);
        return std::exp(sup_log(lg, [](double) { return 0.0; }, r_lo, R));
    }
    LogFn integrand = [&](double r) { return q * lg(r) + log_density_A(p, r); };
    const double R = tail_cut(integrand, r_lo, tol);
    if (kind == NormKind::weak)
        return std::exp(sup_log(lg, [&](double r) { return std::log(volume_V(p, r)) / q; }, r_lo, R));
    // head [0, r_lo] from the endpoint value
    const double head = std::exp(q * lg(r_lo)) * volume_V(p, r_lo);
    const double I = integrate_log(integrand, r_lo, R, tol, backend) + head;
    if (!std::isfinite(I)) throw NumericFailure("lq norm: integral did not converge");
    return std::pow(I, 1.0 / q);
}

std::vector<double> log_uniform(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo * std::pow(hi / lo, double(i) / (n - 1));
    return v;
}

double phase_of(double theta, double mod, cplx& tau) {
    // exact pure-imaginary points at +-pi/2
    if (std::abs(std::abs(theta) - 0.5 * std::numbers::pi) < 1e-14)
        tau = cplx(0.0, theta > 0 ? mod : -mod);
    else
        tau = std::polar(mod, theta);
    return theta;
}

struct Sweep {
    double ratio;  // sup or inf
    long points = 0, excluded = 0;
    double small_ratio, large_ratio;
    long small_pts = 0, large_pts = 0;
};

Sweep upper_sweep(const SpaceParams& p, const UpperGrid& g, double tol) {
    std::vector<double> thetas = g.thetas;
    if (thetas.empty()) {
        const double pi = std::numbers::pi;
        thetas = {0.0, pi / 4, -pi / 4, pi / 2, -pi / 2};
    }
    const auto mods = log_uniform(g.mod_min, g.mod_max, g.mod_steps);
    std::vector<double> rs;
    const int nlog = std::max(2, g.r_steps * 3 / 10);
    if (g.r_min < 1.0)
        for (double r : log_uniform(g.r_min, 1.0, nlog + 1))
            if (r < 1.0) rs.push_back(r);
    const int nlin = g.r_steps - int(rs.size());
    const double lo = std::max(1.0, g.r_min);
    for (int i = 0; i < nlin; ++i) rs.push_back(lo + (g.r_max - lo) * i / std::max(1, nlin - 1));

    const std::size_t N = thetas.size() * mods.size() * rs.size();
    std::vector<double> lr(N, kNegInf);
    std::vector<char> ok(N, 0), small(N, 0);
    const KernelEvaluator& ev = evaluator_for(p);
    parallel_for(N, [&](std::size_t idx) {
        const std::size_t ir = idx % rs.size(), im = (idx / rs.size()) % mods.size(),
                          it = idx / (rs.size() * mods.size());
        cplx tau;
        phase_of(thetas[it], mods[im], tau);
        const double r = rs[ir];
        const auto env = upper_bound_envelope(p, tau, r);
        small[idx] = env.regime == Regime::small;
        try {
            const KernelValue v = ev.h(tau, r, tol);
            if (!v.converged) return;
            lr[idx] = v.scaled.log_abs() - env.log_value;
            ok[idx] = std::isfinite(lr[idx]) || lr[idx] == kNegInf;
        } catch (const std::exception&) {
        }
    });
    Sweep s{0.0, 0, 0, 0.0, 0.0};
    double top = kNegInf, ts = kNegInf, tl = kNegInf;
    // index order is fixed, so the reduction is thread-count independent
    for (std::size_t i = 0; i < N; ++i) {
        if (!ok[i]) {
            ++s.excluded;
            continue;
        }
        ++s.points;
        top = std::max(top, lr[i]);
        if (small[i]) {
            ts = std::max(ts, lr[i]);
            ++s.small_pts;
        } else {
            tl = std::max(tl, lr[i]);
            ++s.large_pts;
        }
    }
    s.ratio = std::exp(top);
    s.small_ratio = std::exp(ts);
    s.large_ratio = std::exp(tl);
    return s;
}

Sweep lower_sweep(const SpaceParams& p, const std::vector<double>& ts, double c, double r_max, int steps,
                  double tol) {
    const KernelEvaluator& ev = evaluator_for(p);
    const std::size_t N = ts.size() * steps;
    std::vector<double> lr(N, std::numeric_limits<double>::infinity());
    std::vector<char> ok(N, 0);
    parallel_for(N, [&](std::size_t idx) {
        const double t = ts[idx / steps];
        const int j = int(idx % steps);
        const double lo = 1.0 + c * t;
        if (!(lo < r_max)) return;
        // open at the left end
        const double r = lo + (r_max - lo) * (j + 1) / steps;
        try {
            const KernelValue v = ev.h(cplx(0.0, t), r, tol);
            if (!v.converged) return;
            lr[idx] = v.scaled.log_abs() - log_lower_bound_envelope(p, t, r, c);
            ok[idx] = 1;
        } catch (const std::exception&) {
        }
    });
    Sweep s{0.0, 0, 0, 0.0, 0.0};
    double bot = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        if (!ok[i]) {
            ++s.excluded;
            continue;
        }
        ++s.points;
        bot = std::min(bot, lr[i]);
    }
    s.ratio = std::exp(bot);
    s.small_ratio = s.ratio;
    s.small_pts = s.points;
    return s;
}

double drift(double a, double b) { return a == 0 ? (b == 0 ? 0.0 : INFINITY) : std::abs(b - a) / std::abs(a); }

}  // namespace

UpperGrid UpperGrid::refined() const {
    UpperGrid g = *this;
    g.mod_steps = 2 * mod_steps - 1;
    g.r_steps = 2 * r_steps;
    return g;
}

std::string UpperGrid::describe() const {
    std::ostringstream os;
    os << "|tau| in [" << mod_min << ", " << mod_max << "] x " << mod_steps << " log; theta x "
       << (thetas.empty() ? 5 : thetas.size()) << "; r in [" << r_min << ", " << r_max << "] x " << r_steps;
    return os.str();
}

LowerGrid LowerGrid::refined() const {
    LowerGrid g = *this;
    g.r_steps = 2 * r_steps;
    return g;
}

std::string LowerGrid::describe() const {
    std::ostringstream os;
    os << "t in {";
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ", " : "") << t[i];
    os << "}; r in (1 + " << c << " t, " << r_max << "] x " << r_steps;
    return os.str();
}

BoundReport verify_upper_bound(const SpaceParams& p, const UpperGrid& grid, double tol) {
    if (!(grid.r_min >= evaluator_for(p).r_min) || !(grid.r_max > grid.r_min) || grid.r_steps < 2 ||
        !(grid.mod_min > 0) || !(grid.mod_max >= grid.mod_min) || grid.mod_steps < 1)
        throw std::invalid_argument("verify_upper_bound: grid outside the kernel domain");
    const Sweep a = upper_sweep(p, grid, tol), b = upper_sweep(p, grid.refined(), tol);
    BoundReport rep;
    rep.kind = "upper";
    rep.grid = grid.describe();
    rep.ratio = a.ratio;
    rep.refined_ratio = b.ratio;
    rep.refinement_drift = drift(a.ratio, b.ratio);
    rep.points = a.points;
    rep.excluded = a.excluded + b.excluded;
    rep.regimes = {{Regime::small, b.small_ratio, b.small_pts}, {Regime::large, b.large_ratio, b.large_pts}};
    rep.stable = rep.refinement_drift <= 0.05 && std::isfinite(rep.ratio);
    return rep;
}

BoundReport verify_lower_bound(const SpaceParams& p, const LowerGrid& grid, double tol) {
    if (grid.t.empty() || grid.r_steps < 2 || !(grid.c > 0)) throw std::invalid_argument("verify_lower_bound: grid");
    for (double t : grid.t)
        if (!(t > 0) || !(1.0 + grid.c * t < grid.r_max))
            throw std::invalid_argument("verify_lower_bound: need 0 < t and 1 + c t < r_max");
    const LowerGrid fine = grid.refined();
    const Sweep a = lower_sweep(p, grid.t, grid.c, grid.r_max, grid.r_steps, tol);
    const Sweep b = lower_sweep(p, grid.t, grid.c, grid.r_max, fine.r_steps, tol);
    BoundReport rep;
    rep.kind = "lower";
    rep.grid = grid.describe();
    rep.ratio = a.ratio;
    rep.refined_ratio = b.ratio;
    rep.refinement_drift = drift(a.ratio, b.ratio);
    rep.points = a.points;
    rep.excluded = a.excluded + b.excluded;
    rep.regimes = {{Regime::small, b.ratio, b.points}};
    rep.stable = rep.refinement_drift <= 0.05 && rep.ratio > 0;

    // how far the region can shrink before the inf collapses
    rep.smallest_c = grid.c;
    bool intact = rep.stable;
    for (double c : {grid.c, 2.0, 1.0, 0.5, 0.25, 0.0}) {
        if (c > grid.c) continue;
        const Sweep ca = lower_sweep(p, grid.t, c, grid.r_max, grid.r_steps, tol);
        const Sweep cb = lower_sweep(p, grid.t, c, grid.r_max, fine.r_steps, tol);
        rep.c_scan.emplace_back(c, cb.ratio);
        const bool held = cb.ratio >= 0.5 * ca.ratio && cb.ratio >= 1e-3 * rep.ratio && cb.ratio > 0;
        intact = intact && held;
        if (intact) rep.smallest_c = c;
    }
    return rep;
}

double lq_kernel_norm(const SpaceParams& p, ComplexTime tau, double q, NormKind kind, double tol,
                      quad::Backend backend) {
    if (!(q > 2)) throw std::invalid_argument("lq_kernel_norm: q must exceed 2");
    const KernelEvaluator& ev = evaluator_for(p);
    return lq_from_log(p, log_abs_kernel(p, tau.value(), std::min(1e-10, tol * 1e-2)), ev.r_min, q, kind, tol,
                       backend);
}

double lq_norm(const SpaceParams& p, const RadialFunction& f, double q, NormKind kind, double tol,
               quad::Backend backend) {
    return lq_from_log(p, log_abs_of(f), std::max(f.r_min, 1e-12), q, kind, tol, backend);
}

double aq_norm(const SpaceParams& p, const RadialFunction& k, double q, double tol, quad::Backend backend) {
    if (!(q >= 2)) throw std::invalid_argument("aq_norm: q >= 2");
    const LogFn lk = log_abs_of(k);
    const double r_lo = std::max(k.r_min, 1e-12);
    if (std::isinf(q)) return std::exp(sup_log(lk, [](double) { return 0.0; }, r_lo, tail_cut(lk, r_lo, tol)));
    auto prof = spherical_profile(p, 0.0, 400.0);
    // phi_0 A in log form: log(e^{Qr/2} phi_0) - Qr/2 + log A
    LogFn integrand = [&](double r) {
        const double y = prof->scaled(r);
        return 0.5 * q * lk(r) + std::log(y) - 0.5 * p.Q * r + log_density_A(p, r);
    };
    const double R = tail_cut(integrand, r_lo, tol);
    const double head = std::exp(0.5 * q * lk(r_lo)) * volume_V(p, r_lo);
    const double I = integrate_log(integrand, r_lo, R, tol, backend) + head;
    if (!std::isfinite(I)) throw NumericFailure("aq_norm: integral did not converge");
    return std::pow(I, 2.0 / q);
}

DecayOptions small_time_defaults() { return DecayOptions{}; }

DecayOptions large_time_defaults() {
    DecayOptions o;
    o.t_min = 2.0;
    o.t_max = 200.0;
    return o;
}

DecayFit decay_fit(const SpaceParams& p, double q, const DecayOptions& opt) {
    if (!(opt.t_min > 0) || !(opt.t_max > opt.t_min)) throw std::invalid_argument("decay_fit: time range");
    if (!((opt.t_max <= 1.0) || (opt.t_min >= 1.0)))
        throw std::invalid_argument("decay_fit: range must lie in (0,1] or [1,inf)");
    if (opt.per_decade < 8) throw std::invalid_argument("decay_fit: at least 8 samples per decade");
    const double decades = std::log10(opt.t_max / opt.t_min);
    const int n = std::max(3, int(std::ceil(opt.per_decade * decades)) + 1);
    DecayFit fit;
    fit.q = q;
    fit.norm = opt.norm;
    fit.times = log_uniform(opt.t_min, opt.t_max, n);
    fit.norms.resize(n);
    const KernelEvaluator* ev = &evaluator_for(p);
    const double ktol = std::min(1e-10, opt.tol * 1e-2);
    parallel_for(n, [&](std::size_t i) {
        const double t = fit.times[i];
        switch (opt.norm) {
            case DecayNorm::lq:
                fit.norms[i] = lq_kernel_norm(p, cplx(0.0, t), q, NormKind::strong, opt.tol);
                break;
            case DecayNorm::lq_weak:
                fit.norms[i] = lq_kernel_norm(p, cplx(0.0, t), q, NormKind::weak, opt.tol);
                break;
            case DecayNorm::aq: {
                RadialFunction s{[ev, t, ktol](double r) { return ev->h(cplx(0.0, t), r, ktol).value; }, ev->r_min,
                                 0.0};
                fit.norms[i] = aq_norm(p, s, q, opt.tol);
                break;
            }
        }
    });
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = std::log(fit.times[i]);
        y[i] = std::log(fit.norms[i]);
    }
    const auto lf = quad::fit_line(x, y);
    fit.slope = lf.slope;
    fit.slope_stderr = lf.slope_stderr;
    fit.residual = lf.residual_rms;
    fit.flagged = fit.residual > opt.residual_threshold;
    return fit;
}

namespace {

// fixed tanh-sinh nodes on [0, R]
void tanh_sinh_nodes(double R, std::vector<double>& x, std::vector<double>& w) {
    const double h = 1.0 / 32, half = 0.5 * std::numbers::pi;
    for (double t = -4.0; t <= 4.0 + 1e-12; t += h) {
        const double u = half * std::sinh(t), ch = std::cosh(u);
        const double xi = std::tanh(u), wi = h * half * std::cosh(t) / (ch * ch);
        x.push_back(0.5 * R * (1 + xi));
        w.push_back(0.5 * R * wi);
    }
}

}  // namespace

ConvolutionCheck convolution_check(const SpaceParams& p, const RadialFunction& f, const RadialFunction& k, double q,
                                   double tol, quad::Backend backend) {
    if (!(q > 2) || std::isinf(q)) throw std::invalid_argument("convolution_check: q in (2, inf)");
    const auto& cal = calibration_for(p);
    const TransformOptions to{tol};
    SpectralBatchFn H = [&](const std::vector<double>& s) {
        auto F = spherical_transform(p, f, s, to), K = spherical_transform(p, k, s, to);
        if (!F.converged || !K.converged) throw NumericFailure("convolution_check: transform did not converge");
        std::vector<cplx> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = F.value[i] * K.value[i];
        return out;
    };
    const double R = 40.0;
    std::vector<double> rx, rw;
    if (backend == quad::Backend::gauss_kronrod)
        quad::composite_gl(0.0, R, 0.25, 15, rx, rw);
    else
        tanh_sinh_nodes(R, rx, rw);
    InverseOptions io;
    io.tol = tol;
    const auto g = inverse_spherical(p, cal, H, rx, io);
    quad::Neumaier<double> acc;
    for (std::size_t j = 0; j < rx.size(); ++j) {
        if (rx[j] <= 0 || g[j] == 0.0) continue;
        acc.add(rw[j] * std::exp(q * std::log(std::abs(g[j])) + log_density_A(p, rx[j])));
    }
    ConvolutionCheck out;
    out.conv_norm = std::pow(acc.value(), 1.0 / q);
    out.k_aq = aq_norm(p, k, q, 1e-8, backend);
    out.f_lqp = lq_norm(p, f, q / (q - 1), NormKind::strong, 1e-8, backend);
    out.ratio = out.conv_norm / (out.k_aq * out.f_lqp);
    return out;
}

std::vector<double> default_growth_list(double L_min, double L_max, int n) {
    std::vector<double> a;
    for (double L : log_uniform(L_min, L_max, n)) a.push_back(std::exp(-L));
    return a;
}

GrowthFit weighted_growth_check(const SpaceParams& p, double t, const std::vector<double>& a_list, double c,
                                double tol) {
    if (t == 0) throw std::invalid_argument("weighted_growth_check: t must be nonzero");
    auto slice = [&](double a) {
        GroupPoint x = identity_point(p);
        x.a = a;
        return sigma_kernel_scaled(p, t, x, tol).log_abs();
    };
    GrowthFit out;
    out.reference_log_abs = slice(0.1);
    std::vector<GrowthPoint> pts(a_list.size());
    std::vector<char> keep(a_list.size(), 0);
    parallel_for(a_list.size(), [&](std::size_t i) {
        const double a = a_list[i];
        if (!(a > 0 && a < 1)) return;
        const double L = -std::log(a);
        if (!(L > 1.0 + c * std::abs(t))) return;
        pts[i] = GrowthPoint{a, L, slice(a)};
        keep[i] = std::isfinite(pts[i].log_abs_sigma);
    });
    std::vector<double> x, y;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!keep[i]) {
            ++out.rejected;
            continue;
        }
        out.points.push_back(pts[i]);
        x.push_back(std::log(pts[i].log_inv_a));
        y.push_back(pts[i].log_abs_sigma);
        out.fit.times.push_back(pts[i].log_inv_a);
        out.fit.norms.push_back(std::exp(pts[i].log_abs_sigma));
        out.max_growth = std::max(out.max_growth, std::exp(pts[i].log_abs_sigma - out.reference_log_abs));
    }
    if (x.size() < 3) throw NumericFailure("weighted_growth_check: fewer than 3 admissible points");
    const auto lf = quad::fit_line(x, y);
    out.fit.q = INFINITY;
    out.fit.slope = lf.slope;
    out.fit.slope_stderr = lf.slope_stderr;
    out.fit.residual = lf.residual_rms;
    out.fit.flagged = lf.residual_rms > 0.05;
    return out;
}

}  // namespace drk
