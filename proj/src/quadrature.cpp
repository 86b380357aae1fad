#include "drk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <queue>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace drk::quad {

namespace {

struct GK15 {
    double x[15];
    double wk[15];
    double wg[15];  // zero at Kronrod-only nodes
};

const GK15& gk15() {
    static const GK15 rule = [] {
        using K = boost::math::quadrature::gauss_kronrod<double, 15>;
        using G = boost::math::quadrature::gauss<double, 7>;
        const auto& kx = K::abscissa();
        const auto& kw = K::weights();
        const auto& gw = G::weights();
        GK15 r{};
        // kx[0] = 0; Gauss nodes sit at even Kronrod indices.
        r.x[7] = 0.0;
        r.wk[7] = kw[0];
        r.wg[7] = gw[0];
        for (int i = 1; i < 8; ++i) {
            r.x[7 + i] = kx[i];
            r.x[7 - i] = -kx[i];
            r.wk[7 + i] = r.wk[7 - i] = kw[i];
            const double g = (i % 2 == 0) ? gw[i / 2] : 0.0;
            r.wg[7 + i] = r.wg[7 - i] = g;
        }
        return r;
    }();
    return rule;
}

struct Interval {
    double a, b;
    cplx val;
    double err;
    bool operator<(const Interval& o) const { return err < o.err; }
};

}  // namespace

CResult gk_adaptive(const BatchFn& f, double a, double b, double abs_tol, double rel_tol, int max_intervals) {
    const GK15& R = gk15();
    CResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    double xs[30];
    cplx ys[30];
    auto eval_pair = [&](double a0, double b0, double a1, double b1, int count, Interval* dst) {
        for (int c = 0; c < count; ++c) {
            const double lo = c == 0 ? a0 : a1, hi = c == 0 ? b0 : b1;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int i = 0; i < 15; ++i) xs[15 * c + i] = mid + half * R.x[i];
        }
        f(xs, ys, static_cast<std::size_t>(15 * count));
        out.evals += 15 * count;
        for (int c = 0; c < count; ++c) {
            const double lo = c == 0 ? a0 : a1, hi = c == 0 ? b0 : b1;
            const double half = 0.5 * (hi - lo);
            cplx k{}, g{};
            for (int i = 0; i < 15; ++i) {
                k += R.wk[i] * ys[15 * c + i];
                g += R.wg[i] * ys[15 * c + i];
            }
            dst[c] = Interval{lo, hi, k * half, std::abs((k - g) * half)};
        }
    };

    std::priority_queue<Interval> heap;
    Interval first[2];
    eval_pair(a, b, 0, 0, 1, first);
    heap.push(first[0]);
    Neumaier<cplx> total;
    total.add(first[0].val);
    double err_total = first[0].err;
    int n_int = 1;
    const double min_width = std::abs(b - a) * 1e-13;
    while (true) {
        const double target = std::max(abs_tol, rel_tol * std::abs(total.value()));
        if (err_total <= target) {
            out.converged = true;
            break;
        }
        if (n_int >= max_intervals) break;
        Interval worst = heap.top();
        if (std::abs(worst.b - worst.a) < min_width) break;
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Interval kids[2];
        eval_pair(worst.a, mid, mid, worst.b, 2, kids);
        total.add(-worst.val);
        total.add(kids[0].val);
        total.add(kids[1].val);
        err_total += kids[0].err + kids[1].err - worst.err;
        heap.push(kids[0]);
        heap.push(kids[1]);
        ++n_int;
        if (n_int % 64 == 0) {
            // refresh the running error against drift
            auto copy = heap;
            double e = 0;
            while (!copy.empty()) {
                e += copy.top().err;
                copy.pop();
            }
            err_total = e;
        }
    }
    out.value = total.value();
    out.error = err_total;
    return out;
}

Result gk_adaptive(const RealFn& f, double a, double b, double abs_tol, double rel_tol, int max_intervals) {
    BatchFn bf = [&](const double* x, cplx* y, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) y[i] = f(x[i]);
    };
    CResult c = gk_adaptive(bf, a, b, abs_tol, rel_tol, max_intervals);
    return Result{c.value.real(), c.error, c.converged, c.evals};
}

namespace {

template <int N>
Rule make_gl() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& ax = G::abscissa();
    const auto& aw = G::weights();
    Rule r;
    const bool odd = N % 2 == 1;
    for (int i = static_cast<int>(ax.size()) - 1; i >= (odd ? 1 : 0); --i) {
        r.x.push_back(-ax[i]);
        r.w.push_back(aw[i]);
    }
    if (odd) {
        r.x.push_back(0.0);
        r.w.push_back(aw[0]);
    }
    for (std::size_t i = odd ? 1 : 0; i < ax.size(); ++i) {
        r.x.push_back(ax[i]);
        r.w.push_back(aw[i]);
    }
    return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    static const Rule r7 = make_gl<7>();
    static const Rule r10 = make_gl<10>();
    static const Rule r15 = make_gl<15>();
    static const Rule r20 = make_gl<20>();
    static const Rule r30 = make_gl<30>();
    switch (n) {
        case 7: return r7;
        case 10: return r10;
        case 15: return r15;
        case 20: return r20;
        case 30: return r30;
        default: throw std::invalid_argument("gauss_legendre: unsupported order");
    }
}

void composite_gl(double a, double b, double h, int n, std::vector<double>& x, std::vector<double>& w) {
    if (!(b > a)) return;
    const Rule& R = gauss_legendre(n);
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    const double H = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * H;
        const double mid = lo + 0.5 * H;
        for (std::size_t i = 0; i < R.x.size(); ++i) {
            x.push_back(mid + 0.5 * H * R.x[i]);
            w.push_back(0.5 * H * R.w[i]);
        }
    }
}

Result integrate_interval(const RealFn& f, double a, double b, Backend backend, double rel_tol) {
    if (backend == Backend::gauss_kronrod) return gk_adaptive(f, a, b, 0.0, rel_tol);
    boost::math::quadrature::tanh_sinh<double> ts(12);
    double err = 0, l1 = 0;
    std::size_t levels = 0;
    Result r;
    try {
        r.value = ts.integrate(f, a, b, std::max(rel_tol, 1e-14), &err, &l1, &levels);
        r.error = err * std::abs(r.value);
        r.converged = err <= std::max(rel_tol, 1e-14) * 10;
    } catch (const std::exception&) {
        r.converged = false;
    }
    return r;
}

Result integrate_half_line(const RealFn& f, double a, Backend backend, double rel_tol, double r_cap) {
    Result out;
    if (backend == Backend::double_exponential) {
        boost::math::quadrature::exp_sinh<double> es(12);
        double err = 0, l1 = 0;
        std::size_t levels = 0;
        try {
            auto g = [&](double t) { return f(a + t); };
            out.value = es.integrate(g, std::max(rel_tol, 1e-14), &err, &l1, &levels);
            out.error = err * std::abs(out.value);
            out.converged = std::isfinite(out.value) && err <= std::max(rel_tol, 1e-14) * 10;
        } catch (const std::exception&) {
            out.converged = false;
        }
        return out;
    }
    Neumaier<double> total;
    double err = 0;
    double lo = a, width = 0.5;
    int small_streak = 0;
    while (lo < r_cap) {
        const double hi = std::min(lo + width, r_cap);
        Result p = gk_adaptive(f, lo, hi, 0.0, rel_tol * 0.1);
        out.evals += p.evals;
        total.add(p.value);
        err += p.error;
        if (std::abs(p.value) <= rel_tol * 1e-2 * std::abs(total.value()) || p.value == 0.0)
            ++small_streak;
        else
            small_streak = 0;
        lo = hi;
        if (small_streak >= 3) {
            out.converged = true;
            break;
        }
        width = std::min(width * 1.25, 4.0);
    }
    out.value = total.value();
    out.error = err;
    return out;
}

cplx WynnEpsilon::push(cplx partial_sum) {
    ++total_;
    s_.push_back(partial_sum);
    if (s_.size() > window_) s_.erase(s_.begin());
    const std::size_t N = s_.size();
    std::vector<cplx> prev(N + 1, cplx{}), cur(s_.begin(), s_.end()), next;
    cplx best = s_.back();
    cplx best_prev = N >= 2 ? s_[N - 2] : s_.back();
    for (std::size_t k = 1; k < N; ++k) {
        next.assign(N - k, cplx{});
        bool broke = false;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const cplx d = cur[i + 1] - cur[i];
            if (std::abs(d) <= 1e-300 + 1e-17 * std::abs(cur[i + 1])) {
                broke = true;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / d;
        }
        if (broke) break;
        if (k % 2 == 0) {
            best_prev = next.size() >= 2 ? next[next.size() - 2] : best;
            best = next.back();
        }
        prev.assign(cur.begin(), cur.end());
        cur = next;
    }
    if (!std::isfinite(best.real()) || !std::isfinite(best.imag())) best = s_.back();
    prev_est_ = est_;
    est_ = best;
    spread_ = std::max(std::abs(best - best_prev), total_ > 1 ? std::abs(est_ - prev_est_) : 0.0);
    return est_;
}

cplx extrapolate_to_zero(const std::vector<double>& x, const std::vector<cplx>& y, double* err) {
    const std::size_t n = x.size();
    std::vector<cplx> P(y);
    cplx last_corr{};
    for (std::size_t m = 1; m < n; ++m) {
        for (std::size_t i = 0; i + m < n; ++i) {
            // P_{i..i+m}(0)
            const cplx next = (x[i + m] * P[i] - x[i] * P[i + 1]) / (x[i + m] - x[i]);
            if (i == 0) last_corr = next - P[0];
            P[i] = next;
        }
    }
    if (err) *err = std::abs(last_corr);
    return P[0];
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    LineFit f;
    if (n < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        ss += e * e;
    }
    f.residual_rms = std::sqrt(ss / n);
    f.slope_stderr = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    return f;
}

}  // namespace drk::quad
