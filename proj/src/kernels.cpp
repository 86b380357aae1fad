#include "drk/kernels.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "drk/parallel.hpp"
#include "drk/quadrature.hpp"

namespace drk {

using std::numbers::pi;

ComplexTime::ComplexTime(cplx tau) : tau_(tau) {
    if (tau == 0.0) throw std::invalid_argument("tau must be nonzero");
    if (tau.real() < 0) throw std::invalid_argument("Re tau must be >= 0");
}

const char* method_name(KernelMethod m) {
    return m == KernelMethod::even_closed_form ? "even-closed-form" : "odd-quadrature";
}

double kernel_constant(const SpaceParams& p) {
    const double omega = haar_radial_factor(p);
    const double ce = omega * std::pow(4 * pi, -0.5 * (p.n - 1)) * std::pow(2.0, 0.5 * p.k);
    return p.k % 2 == 0 ? ce : ce / std::sqrt(pi);
}

KernelEvaluator::KernelEvaluator(const SpaceParams& p) : p_(p), chain_(kernel_chain(p)), C_(kernel_constant(p)) {}

namespace {

// prefactor C (4 pi tau)^{-1/2} e^{-Q^2 tau/4}
Scaled prefactor(double C, double Q, cplx tau) {
    return Scaled::exp_of(-Q * Q * tau / 4.0) * (C / std::sqrt(4.0 * pi * tau));
}

}  // namespace

KernelValue KernelEvaluator::h(cplx tau, double r, double tol) const {
    ComplexTime ct(tau);
    if (!(r >= r_min)) throw std::domain_error("kernel: r below r_min");
    KernelValue kv;
    kv.r = r;
    kv.tau = tau;
    if (p_.k % 2 == 0) {
        kv.method = KernelMethod::even_closed_form;
        kv.scaled = prefactor(C_, p_.Q, tau) * chain_.eval_scaled(r, tau);
    } else {
        kv.method = KernelMethod::odd_quadrature;
        OddIntegralOptions opt;
        opt.tol = tol;
        auto oi = odd_integral(tau, r, opt);
        kv.scaled = prefactor(C_, p_.Q, tau) * oi.value;
        kv.quad_error = oi.rel_error;
        kv.converged = oi.converged;
        kv.cells = oi.cells;
    }
    kv.value = kv.scaled.value();
    return kv;
}

OddIntegralResult KernelEvaluator::odd_integral(cplx tau, double r, const OddIntegralOptions& opt) const {
    if (p_.k % 2 == 0) throw std::invalid_argument("odd_integral: k must be odd");
    if (!(opt.tol > 0)) throw std::invalid_argument("odd_integral: tol must be positive");
    ComplexTime ct(tau);
    if (!(r >= r_min)) throw std::domain_error("odd_integral: r below r_min");

    const double E = chain_.e2max();  // <= -3 for every odd chain
    const cplx it = 1.0 / tau;
    const double reit = it.real(), imit = std::abs(it.imag());
    const double a = -std::expm1(-2.0 * r);

    // W = omega^2 = (cosh s - cosh r) e^{-r}, delta = s - r
    auto omega_of = [&](double d) {
        const double B = 0.5 * d;
        return std::sqrt(std::exp(B) * (-std::expm1(-(2.0 * r + d))) * std::sinh(B));
    };
    auto delta_of = [&](double w) {
        const double W = w * w;
        const double D = a * a + 4.0 * W * (2.0 - a) + 4.0 * W * W;
        return std::log1p(W + (2.0 * W * (2.0 - a) + 2.0 * W * W) / (std::sqrt(D) + a));
    };

    long evals = 0;
    quad::BatchFn f = [&](const double* w, cplx* y, std::size_t n) {
        thread_local std::vector<double> s, d;
        thread_local std::vector<cplx> M;
        s.resize(n);
        d.resize(n);
        M.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = delta_of(w[i]);
            s[i] = r + d[i];
        }
        chain_.eval_M(s.data(), n, tau, M.data());
        for (std::size_t i = 0; i < n; ++i) {
            const cplx ex = 0.5 * E * d[i] - d[i] * (d[i] + 2.0 * r) * it / 4.0;
            y[i] = M[i] * std::exp(ex);
        }
        evals += static_cast<long>(n);
    };
    auto abs_f = [&](double w) {
        cplx y;
        f(&w, &y, 1);
        return std::abs(y);
    };

    OddIntegralResult out;
    quad::Neumaier<cplx> S;
    double qerr = 0.0;
    quad::WynnEpsilon wynn(30);
    int stable = 0;
    long n_phase = 1;
    double d_lo = 0.0, w_lo = 0.0;
    // first non-oscillatory width from the Gaussian scale
    double width = 1.0;
    if (reit > 0) width = std::clamp(2.0 / (r * reit + std::sqrt(reit)), 1e-6, 1.0);
    const double tail_factor = 4.0 / (std::abs(E) - 1.0);
    cplx result{};
    double err = 0.0;
    bool done = false;
    int cell = 0;
    for (; cell < opt.max_cells && !done; ++cell) {
        double d_phase = std::numeric_limits<double>::infinity();
        if (imit > 0) {
            while (true) {
                const double q = 4.0 * pi * static_cast<double>(n_phase) / imit;
                d_phase = q / (std::sqrt(r * r + q) + r);
                if (d_phase > d_lo * (1 + 1e-14) + 1e-300) break;
                ++n_phase;
            }
        }
        const bool phase_cell = d_phase <= d_lo + width;
        const double d_hi = phase_cell ? d_phase : d_lo + width;
        if (!phase_cell) width = std::min(2.0 * width, 1.0);
        if (d_hi > 1400.0) break;
        const double w_hi = omega_of(d_hi);
        const double scale = std::abs(S.value());
        auto c = quad::gk_adaptive(f, w_lo, w_hi, 0.02 * opt.tol * scale, 0.1 * opt.tol, 400);
        S.add(c.value);
        qerr += c.error;
        d_lo = d_hi;
        w_lo = w_hi;
        const cplx partial = S.value();
        const double tail = abs_f(w_hi) * w_hi * tail_factor;
        if (tail <= opt.tol * std::abs(partial) && std::abs(partial) > 0) {
            result = partial;
            err = tail + qerr;
            done = true;
            break;
        }
        if (phase_cell) {
            const cplx est = wynn.push(partial);
            if (wynn.count() >= 12 && wynn.spread() <= opt.tol * std::abs(est))
                ++stable;
            else
                stable = 0;
            if (stable >= 3) {
                result = est;
                err = wynn.spread() + qerr;
                done = true;
                break;
            }
        }
    }
    if (!done) {
        result = wynn.count() > 0 ? wynn.estimate() : S.value();
        err = std::max(wynn.spread(), std::abs(S.value() - result)) + qerr;
    }
    out.converged = done && err <= 10 * opt.tol * std::abs(result) + 1e-300;
    out.cells = cell + (done ? 1 : 0);
    out.evals = evals;
    out.rel_error = std::abs(result) > 0 ? err / std::abs(result) : std::numeric_limits<double>::infinity();
    // I = 2 e^{r/2} e^{-r^2/(4 tau) + E r/2} J
    const cplx ex = 0.5 * r + 0.5 * E * r - r * r * it / 4.0;
    out.value = Scaled::exp_of(ex) * (2.0 * result);
    return out;
}

const KernelEvaluator& evaluator_for(const SpaceParams& p) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<KernelEvaluator>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = cache[{p.m, p.k}];
    if (!slot) slot = std::make_unique<KernelEvaluator>(p);
    return *slot;
}

KernelValue kernel_h(const SpaceParams& p, ComplexTime tau, double r, double tol) {
    return evaluator_for(p).h(tau.value(), r, tol);
}

OddIntegralResult odd_k_integral(const SpaceParams& p, ComplexTime tau, double r, double tol) {
    OddIntegralOptions opt;
    opt.tol = tol;
    return evaluator_for(p).odd_integral(tau.value(), r, opt);
}

KernelValue schrodinger_kernel(const SpaceParams& p, double t, double r, double tol) {
    if (t == 0) throw std::invalid_argument("schrodinger_kernel: t must be nonzero");
    return kernel_h(p, ComplexTime(cplx(0.0, t)), r, tol);
}

Scaled sigma_kernel_scaled(const SpaceParams& p, double t, const GroupPoint& x, double tol) {
    const double r = distance_to_identity(p, x);
    const KernelValue s = schrodinger_kernel(p, t, r, tol);
    // delta^{1/2} = a^{-Q/2}, times e^{i Q^2 t/4}
    return s.scaled * Scaled::exp_of(cplx(-0.5 * p.Q * std::log(x.a), p.Q * p.Q * t / 4.0));
}

cplx sigma_kernel(const SpaceParams& p, double t, const GroupPoint& x, double tol) {
    return sigma_kernel_scaled(p, t, x, tol).value();
}

BoundEnvelope upper_bound_envelope(const SpaceParams& p, ComplexTime tau, double r) {
    const cplx t = tau.value();
    const double mod = std::abs(t);
    BoundEnvelope env;
    const double gauss = -0.25 * (p.Q * p.Q * t + r * r / t).real();
    if (mod <= 1.0 + r) {
        env.regime = Regime::small;
        env.log_value = -0.5 * p.n * std::log(mod) + 0.5 * (p.n - 1) * std::log1p(r) - 0.5 * p.Q * r + gauss;
    } else {
        env.regime = Regime::large;
        env.log_value = -1.5 * std::log(mod) + std::log1p(r) - 0.5 * p.Q * r + gauss;
    }
    return env;
}

double log_lower_bound_envelope(const SpaceParams& p, double t, double r, double c) {
    if (!(t > 0)) throw std::invalid_argument("lower bound: t > 0");
    if (!(r > 1.0 + c * t)) throw std::domain_error("lower bound: r inside the excluded region");
    return -0.5 * p.n * std::log(t) + 0.5 * (p.n - 1) * std::log(r) - 0.5 * p.Q * r;
}

double lower_bound_envelope(const SpaceParams& p, double t, double r, double c) {
    return std::exp(log_lower_bound_envelope(p, t, r, c));
}

KernelGrid kernel_grid(const SpaceParams& p, const std::vector<double>& r_values, const std::vector<cplx>& taus,
                       double tol) {
    KernelGrid g;
    g.params = p;
    g.rows.resize(r_values.size() * taus.size());
    const KernelEvaluator& ev = evaluator_for(p);
    parallel_for(g.rows.size(), [&](std::size_t idx) {
        const std::size_t it = idx / r_values.size(), ir = idx % r_values.size();
        g.rows[idx] = KernelGridRow{r_values[ir], taus[it], ev.h(taus[it], r_values[ir], tol)};
    });
    return g;
}

}  // namespace drk
