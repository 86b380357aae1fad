#include "drk/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "drk/kernels.hpp"
#include "drk/parallel.hpp"
#include "drk/quadrature.hpp"

namespace drk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_abs(cplx z) {
    const double a = std::abs(z);
    return a > 0 ? std::log(a) : kNegInf;
}

// where |f|^2 A has dropped e^{-50} below its peak and keeps falling
double support_radius(const SpaceParams& p, const RadialFunction& f) {
    double top = kNegInf, prev = kNegInf;
    int falling = 0;
    for (double r = std::max(0.5, f.r_min); r < 400.0; r += 0.5) {
        const double v = 2 * log_abs(f.eval(r)) + log_density_A(p, r);
        top = std::max(top, v);
        falling = v < prev ? falling + 1 : 0;
        prev = v;
        if (falling >= 3 && v < top - 50.0) return r;
    }
    throw NumericFailure("radial data does not decay by r = 400");
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

Multiplier identity_multiplier() { return Multiplier{[](double) { return cplx(1.0, 0.0); }, "identity"}; }

Multiplier schrodinger_multiplier(const SpaceParams& p, double t) {
    const double q2 = 0.25 * p.Q * p.Q;
    std::ostringstream os;
    os << "schrodinger:" << t;
    return Multiplier{[t, q2](double s) { return std::polar(1.0, -t * (s * s + q2)); }, os.str()};
}

Multiplier heat_multiplier(const SpaceParams& p, cplx tau) {
    if (tau.real() < 0) throw std::invalid_argument("heat_multiplier: Re tau >= 0");
    const double q2 = 0.25 * p.Q * p.Q;
    std::ostringstream os;
    os << "heat:" << tau.real() << (tau.imag() < 0 ? "" : "+") << tau.imag() << "i";
    return Multiplier{[tau, q2](double s) { return std::exp(-tau * (s * s + q2)); }, os.str()};
}

Multiplier compose(const Multiplier& a, const Multiplier& b) {
    return Multiplier{[a, b](double s) { return a.eval(s) * b.eval(s); }, a.descriptor + "*" + b.descriptor};
}

double multiplier_sup(const Multiplier& m, double s_max, int samples) {
    double sup = 0;
    for (double s : linspace(0.0, s_max, samples)) {
        const double v = std::abs(m.eval(s));
        if (!std::isfinite(v)) return INFINITY;
        sup = std::max(sup, v);
    }
    return sup;
}

RadialCalculus::RadialCalculus(const SpaceParams& p, const RadialFunction& f, double t_max,
                               const CalculusOptions& opt) {
    r_lo_ = std::max(0.0, f.r_min);
    const double Rf = support_radius(p, f);
    double s_max = opt.s_max, s_travel = opt.s_max;
    if (!(s_max > 0)) {
        std::vector<double> scan;
        for (double s = 0.5; s <= 60.0; s += 0.5) scan.push_back(s);
        const auto T = spherical_transform(p, f, scan, TransformOptions{opt.tol, opt.ode_tol});
        std::vector<double> w(scan.size());
        double peak = 0;
        for (std::size_t i = 0; i < scan.size(); ++i) {
            w[i] = std::abs(T.value[i]) * std::pow(1.0 + scan[i], 0.5 * (p.n - 1));
            peak = std::max(peak, w[i]);
        }
        if (!(peak > 0)) throw std::invalid_argument("RadialCalculus: data has zero transform");
        if (w.back() > 1e-9 * peak) throw NumericFailure("RadialCalculus: transform does not decay by s = 60");
        // last scan point still above each threshold
        auto last_above = [&](double level) {
            for (std::size_t i = scan.size(); i-- > 0;)
                if (w[i] > level * peak) return scan[i];
            return scan.front();
        };
        s_max = last_above(1e-9) + 1.0;
        s_travel = last_above(1e-6);
    }
    const double R = opt.r_max > 0 ? opt.r_max : Rf + 2.0 * s_travel * std::abs(t_max) + 5.0;
    basis_ = std::make_shared<const SpectralBasis>(p, s_max, R, opt.ode_tol);
    Hf_ = transform(f);
    const NormResult n2 = lq_norm_left(p, f, 2.0, 1e-10);
    f_l2_ = n2.value;
}

std::vector<cplx> RadialCalculus::transform(const RadialFunction& g) const {
    const auto& r = basis_->r();
    const SpaceParams& p = basis_->params();
    std::vector<cplx> ft(r.size());
    const double lo = std::max(r_lo_, g.r_min);
    for (std::size_t j = 0; j < r.size(); ++j)
        ft[j] = std::exp(0.5 * p.Q * r[j]) * g.eval(std::max(r[j], lo));
    return basis_->forward(ft);
}

std::vector<cplx> RadialCalculus::times(const Multiplier& m) const {
    std::vector<cplx> out(Hf_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.eval(basis_->s()[i]) * Hf_[i];
    return out;
}

std::vector<cplx> RadialCalculus::nodes(const std::vector<cplx>& spec) const { return basis_->inverse(spec); }

std::vector<cplx> RadialCalculus::at(const std::vector<cplx>& spec, const std::vector<double>& r) const {
    auto u = basis_->inverse_at(spec, r);
    for (std::size_t j = 0; j < r.size(); ++j) u[j] *= std::exp(-0.5 * basis_->params().Q * r[j]);
    return u;
}

double RadialCalculus::lq(const std::vector<cplx>& ft, double q) const {
    const auto& r = basis_->r();
    const auto& w = basis_->r_weights();
    const auto& At = basis_->scaled_density_A();
    const double Q = basis_->params().Q;
    if (ft.size() != r.size()) throw std::invalid_argument("RadialCalculus::lq: size mismatch");
    if (std::isinf(q)) {
        double sup = 0;
        for (std::size_t j = 0; j < r.size(); ++j) sup = std::max(sup, std::abs(ft[j]) * std::exp(-0.5 * Q * r[j]));
        return sup;
    }
    quad::Neumaier<double> acc;
    for (std::size_t j = 0; j < r.size(); ++j) {
        const double a = std::abs(ft[j]);
        if (a == 0) continue;
        acc.add(w[j] * At[j] * std::exp(q * std::log(a) + (1.0 - 0.5 * q) * Q * r[j]));
    }
    return std::pow(acc.value(), 1.0 / q);
}

RadialFunction apply_multiplier(const SpaceParams& p, const Multiplier& m, const RadialFunction& f,
                                const CalculusOptions& opt) {
    RadialCalculus calc(p, f, 0.0, opt);
    const SpectralBasis& B = calc.basis();
    const double sup = multiplier_sup(m, B.s().back());
    if (!std::isfinite(sup) || sup > 1e12) throw std::invalid_argument("apply_multiplier: multiplier not bounded");
    const auto spec = calc.times(m);
    // keep the node profiles alive so evaluation does not re-solve them
    struct State {
        std::vector<std::shared_ptr<const SphericalProfile>> prof;
        std::vector<cplx> g;
        double Q, r_top;
    };
    auto st = std::make_shared<State>();
    st->Q = p.Q;
    st->r_top = std::max(60.0, B.r().back());
    st->prof.resize(B.s().size());
    st->g.resize(B.s().size());
    parallel_for(B.s().size(), [&](std::size_t i) {
        st->prof[i] = std::make_shared<const SphericalProfile>(p, B.s()[i], st->r_top, B.ode_tolerance());
        st->g[i] = spec[i] * (B.s_weights()[i] * B.density()[i] * B.c_S());
    });
    return RadialFunction{[st](double r) {
                              quad::Neumaier<cplx> acc;
                              for (std::size_t i = 0; i < st->g.size(); ++i)
                                  acc.add(st->g[i] * st->prof[i]->scaled(r));
                              return acc.value() * std::exp(-0.5 * st->Q * r);
                          },
                          0.0, f.decay_rate};
}

double EvolutionRecord::lq_norm(std::size_t ti, double q) const {
    if (!calculus || ti >= u_nodes.size()) throw std::out_of_range("EvolutionRecord::lq_norm");
    return calculus->lq(u_nodes[ti], q);
}

namespace {

EvolutionRecord assemble(const SpaceParams& p, std::shared_ptr<const RadialCalculus> calc,
                         const std::vector<double>& t_grid, const std::vector<std::vector<cplx>>& spectra,
                         const EvolutionOptions& opt, const std::string& descriptor) {
    EvolutionRecord rec;
    rec.params = p;
    rec.data = descriptor;
    rec.t = t_grid;
    rec.r = linspace(0.0, opt.r_out_max, opt.r_out_steps);
    const auto table = calc->basis().tabulate(rec.r);
    rec.u.resize(t_grid.size());
    rec.u_nodes.resize(t_grid.size());
    rec.l2.resize(t_grid.size());
    rec.l2_initial = calc->f_l2();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        rec.u_nodes[i] = calc->nodes(spectra[i]);
        rec.u[i] = calc->basis().inverse(table, spectra[i]);
        for (std::size_t j = 0; j < rec.r.size(); ++j) rec.u[i][j] *= std::exp(-0.5 * p.Q * rec.r[j]);
        rec.l2[i] = calc->lq(rec.u_nodes[i], 2.0);
        rec.max_l2_drift = std::max(rec.max_l2_drift, std::abs(rec.l2[i] - rec.l2_initial) / rec.l2_initial);
    }
    rec.calculus = std::move(calc);
    return rec;
}

}  // namespace

EvolutionRecord evolve_schrodinger(const SpaceParams& p, const RadialFunction& f, const std::vector<double>& t_grid,
                                   const EvolutionOptions& opt, const std::string& descriptor) {
    if (t_grid.empty()) throw std::invalid_argument("evolve_schrodinger: empty time grid");
    double t_max = 0;
    for (double t : t_grid) t_max = std::max(t_max, std::abs(t));
    auto calc = std::make_shared<const RadialCalculus>(p, f, t_max, opt.calculus);
    std::vector<std::vector<cplx>> spectra(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) spectra[i] = calc->times(schrodinger_multiplier(p, t_grid[i]));
    return assemble(p, std::move(calc), t_grid, spectra, opt, descriptor);
}

cplx DistinguishedRecord::on_slice(std::size_t ti, double a) const { return on_slice(ti, std::vector<double>{a})[0]; }

std::vector<cplx> DistinguishedRecord::on_slice(std::size_t ti, const std::vector<double>& a) const {
    if (ti >= core.t.size()) throw std::out_of_range("DistinguishedRecord::on_slice");
    const SpaceParams& p = core.params;
    const double t = core.t[ti];
    std::vector<double> r(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (!(a[j] > 0)) throw std::invalid_argument("on_slice: a must be positive");
        r[j] = std::abs(std::log(a[j]));
    }
    const auto v = core.calculus->at(core.calculus->times(schrodinger_multiplier(p, t)), r);
    std::vector<cplx> u(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        u[j] = std::polar(std::pow(a[j], -0.5 * p.Q), 0.25 * p.Q * p.Q * t) * v[j];
    return u;
}

DistinguishedRecord evolve_distinguished(const SpaceParams& p, const RadialFunction& core,
                                         const std::vector<double>& t_grid, const EvolutionOptions& opt,
                                         const std::string& descriptor) {
    return DistinguishedRecord{evolve_schrodinger(p, core, t_grid, opt, descriptor + " (twisted core)")};
}

bool is_admissible_reciprocal(int n, double ip, double iq) {
    if (!(ip >= 0 && ip <= 0.5) || !(iq >= 0 && iq <= 0.5))
        throw std::invalid_argument("is_admissible: p, q >= 2");
    if (ip == 0.0 && iq == 0.5) return true;
    if (!(ip > 0 && iq > 0 && iq < 0.5)) return false;
    return 2 * ip + n * iq >= 0.5 * n - 1e-12;
}

bool is_admissible(int n, const AdmissiblePair& pr) {
    if (!(pr.p >= 2) || !(pr.q >= 2)) throw std::invalid_argument("is_admissible: p, q >= 2");
    return is_admissible_reciprocal(n, std::isinf(pr.p) ? 0.0 : 1.0 / pr.p, std::isinf(pr.q) ? 0.0 : 1.0 / pr.q);
}

bool is_admissible(const SpaceParams& p, const AdmissiblePair& pair) { return is_admissible(p.n, pair); }

double strichartz_window_norm(const EvolutionRecord& rec, const AdmissiblePair& pair, const TimeWindow& w,
                              bool check_admissible) {
    if (check_admissible && !is_admissible(rec.params, pair))
        throw std::invalid_argument("strichartz_window_norm: pair outside the admissible triangle");
    const auto& t = rec.t;
    if (t.size() < 2 || !(w.t1 > w.t0) || w.t0 < t.front() - 1e-12 || w.t1 > t.back() + 1e-12)
        throw std::invalid_argument("strichartz_window_norm: window outside record");
    std::vector<double> nq(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) nq[i] = rec.lq_norm(i, pair.q);
    const bool sup = std::isinf(pair.p);
    auto g = [&](std::size_t i) { return sup ? nq[i] : std::pow(nq[i], pair.p); };
    // integrand at an arbitrary time by linear interpolation on the grid
    auto interp = [&](double x) {
        std::size_t k = std::upper_bound(t.begin(), t.end(), x) - t.begin();
        k = std::clamp<std::size_t>(k, 1, t.size() - 1);
        const double th = (x - t[k - 1]) / (t[k] - t[k - 1]);
        return (1 - th) * g(k - 1) + th * g(k);
    };
    std::vector<double> xs{w.t0}, ys{interp(w.t0)};
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > w.t0 + 1e-12 && t[i] < w.t1 - 1e-12) {
            xs.push_back(t[i]);
            ys.push_back(g(i));
        }
    xs.push_back(w.t1);
    ys.push_back(interp(w.t1));
    if (sup) return *std::max_element(ys.begin(), ys.end());
    quad::Neumaier<double> acc;
    for (std::size_t i = 1; i < xs.size(); ++i) acc.add(0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]));
    return std::pow(acc.value(), 1.0 / pair.p);
}

EvolutionRecord inhomogeneous_solution(const SpaceParams& p, const RadialFunction& f, const Forcing& F,
                                       const std::vector<double>& t_grid, const EvolutionOptions& opt) {
    if (t_grid.size() < 2 || t_grid.front() != 0.0) throw std::invalid_argument("inhomogeneous: t_grid starts at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("inhomogeneous: t_grid must increase");
    const double t_max = t_grid.back();
    // size the basis on data plus forcing at both ends
    RadialFunction probe{[&](double r) {
                             return std::abs(f.eval(r)) + std::abs(F(0.0, r)) + std::abs(F(t_max, r));
                         },
                         f.r_min, 0.0};
    auto calc = std::make_shared<const RadialCalculus>(p, probe, t_max, opt.calculus);
    const auto& s = calc->basis().s();
    const std::size_t ns = s.size(), nt = t_grid.size();
    const auto Hf = calc->transform(f);
    std::vector<std::vector<cplx>> HF(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        const double tj = t_grid[j];
        HF[j] = calc->transform(RadialFunction{[&, tj](double r) { return F(tj, r); }, f.r_min, 0.0});
    }
    std::vector<double> lam(ns);
    for (std::size_t i = 0; i < ns; ++i) lam[i] = s[i] * s[i] + 0.25 * p.Q * p.Q;

    // trapezoid over t_0..t_n with the given stride
    auto duhamel = [&](std::size_t n, std::size_t stride) {
        std::vector<cplx> out(ns);
        for (std::size_t j = 0; j + stride <= n; j += stride) {
            const double h = t_grid[j + stride] - t_grid[j];
            for (std::size_t i = 0; i < ns; ++i)
                out[i] += 0.5 * h *
                          (std::polar(1.0, -(t_grid[n] - t_grid[j]) * lam[i]) * HF[j][i] +
                           std::polar(1.0, -(t_grid[n] - t_grid[j + stride]) * lam[i]) * HF[j + stride][i]);
        }
        return out;
    };
    std::vector<std::vector<cplx>> spectra(nt);
    double err = 0;
    const auto& B = calc->basis();
    for (std::size_t n = 0; n < nt; ++n) {
        auto full = duhamel(n, 1);
        if (n % 2 == 0 && n > 0) {
            const auto half = duhamel(n, 2);
            quad::Neumaier<double> acc;
            for (std::size_t i = 0; i < ns; ++i)
                acc.add(B.s_weights()[i] * B.density()[i] * std::norm(full[i] - half[i]));
            err = std::max(err, std::sqrt(B.c_S() * acc.value()) / 3.0);
        }
        for (std::size_t i = 0; i < ns; ++i) full[i] += std::polar(1.0, -t_grid[n] * lam[i]) * Hf[i];
        spectra[n] = std::move(full);
    }
    EvolutionRecord rec = assemble(p, calc, t_grid, spectra, opt, "inhomogeneous");
    // the probe norm is not ||f||; recompute the reference
    rec.l2_initial = lq_norm_left(p, f, 2.0, 1e-10).value;
    rec.max_l2_drift = 0;
    rec.duhamel_error = err;
    return rec;
}

double schrodinger_residual(const RadialCalculus& calc, double t, const std::vector<double>& r, double dt, double dr) {
    const SpaceParams& p = calc.params();
    std::vector<double> radii;
    for (double x : r) {
        if (!(x > 2 * dr)) throw std::invalid_argument("schrodinger_residual: interior radii only");
        for (int k = -2; k <= 2; ++k) radii.push_back(x + k * dr);
    }
    const auto table = calc.basis().tabulate(radii);
    auto eval = [&](double tt) {
        auto u = calc.basis().inverse(table, calc.times(schrodinger_multiplier(p, tt)));
        for (std::size_t j = 0; j < radii.size(); ++j) u[j] *= std::exp(-0.5 * p.Q * radii[j]);
        return u;
    };
    const auto u0 = eval(t), um2 = eval(t - 2 * dt), um1 = eval(t - dt), up1 = eval(t + dt), up2 = eval(t + 2 * dt);
    double worst = 0, scale = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const std::size_t c = 5 * k + 2;
        const cplx ut = (-up2[c] + 8.0 * up1[c] - 8.0 * um1[c] + um2[c]) / (12 * dt);
        const cplx ur = (-u0[c + 2] + 8.0 * u0[c + 1] - 8.0 * u0[c - 1] + u0[c - 2]) / (12 * dr);
        const cplx urr = (-u0[c + 2] + 16.0 * u0[c + 1] - 30.0 * u0[c] + 16.0 * u0[c - 1] - u0[c - 2]) / (12 * dr * dr);
        const cplx res = cplx(0, 1) * ut + urr + density_log_derivative(p, r[k]) * ur;
        worst = std::max(worst, std::abs(res));
        scale = std::max(scale, std::abs(u0[c]));
    }
    return worst / scale;
}

RadialFunction data_by_name(const SpaceParams& p, const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("data: expected kind:value, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    double v = 0;
    try {
        std::size_t used = 0;
        v = std::stod(spec.substr(colon + 1), &used);
        if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::invalid_argument("data: bad number in '" + spec + "'");
    }
    if (!(v > 0)) throw std::invalid_argument("data: parameter must be positive");
    if (kind == "gaussian")
        return RadialFunction{[v](double r) { return cplx(std::exp(-r * r / (2 * v * v)), 0.0); }, 0.0, 0.0};
    if (kind == "heat") {
        const KernelEvaluator* ev = &evaluator_for(p);
        return RadialFunction{[ev, v](double r) { return ev->h(cplx(v, 0.0), r, 1e-13).value; }, ev->r_min, 0.0};
    }
    throw std::invalid_argument("data: unknown kind '" + kind + "'");
}

}  // namespace drk
