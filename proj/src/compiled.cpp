#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "drk/symbolic.hpp"

namespace drk {

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;

constexpr int kP = 0, kSh = 1, kCh = 2, kSh2 = 3, kCh2 = 4, kV = 5;

}  // namespace

CompiledSum::CompiledSum(const SymbolicSum& s) {
    bool first = true;
    for (const auto& [e, c] : s.raw()) {
        const int E2 = 2 * e[2] + 2 * e[3] + e[4] + e[5];
        e2max_ = first ? E2 : std::max(e2max_, E2);
        first = false;
    }
    for (const auto& [e, c] : s.raw()) {
        Term t;
        t.coeff = static_cast<double>(c);
        t.exact = c;
        t.j = e[1];
        t.e[kP] = e[0];
        t.e[kSh] = e[2];
        t.e[kCh] = e[3];
        t.e[kSh2] = e[4];
        t.e[kCh2] = e[5];
        t.e[kV] = e2max_ - (2 * e[2] + 2 * e[3] + e[4] + e[5]);
        max_j_ = std::max(max_j_, t.j);
        terms_.push_back(t);
    }
    for (int f = 0; f < 6; ++f) {
        lo_[f] = 0;
        hi_[f] = 0;
        for (const auto& t : terms_) {
            lo_[f] = std::min(lo_[f], t.e[f]);
            hi_[f] = std::max(hi_[f], t.e[f]);
        }
    }
}

void CompiledSum::eval_b(const double* x, std::size_t n, std::vector<double>& b, std::vector<double>& babs,
                         const simd::Kernels* kern) const {
    const simd::Kernels& K = kern ? *kern : simd::active();
    thread_local std::vector<double> tab[6];
    thread_local std::vector<double> base[6];
    thread_local std::vector<double> comp;
    thread_local std::vector<simd::TermRows> rows;
    for (int f = 0; f < 6; ++f) base[f].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double em2 = std::exp(-2.0 * xi), em1 = std::exp(-xi);
        base[kP][i] = xi;
        base[kSh][i] = -0.5 * std::expm1(-2.0 * xi);
        base[kCh][i] = 0.5 * (1.0 + em2);
        base[kSh2][i] = -0.5 * std::expm1(-xi);
        base[kCh2][i] = 0.5 * (1.0 + em1);
        base[kV][i] = std::exp(-0.5 * xi);
    }
    for (int f = 0; f < 6; ++f) {
        const int span = hi_[f] - lo_[f] + 1;
        auto& T = tab[f];
        T.assign(static_cast<std::size_t>(span) * n, 1.0);
        const int zero = -lo_[f];
        for (int e = 1; e <= hi_[f]; ++e)
            for (std::size_t i = 0; i < n; ++i) T[(zero + e) * n + i] = T[(zero + e - 1) * n + i] * base[f][i];
        for (int e = -1; e >= lo_[f]; --e)
            for (std::size_t i = 0; i < n; ++i) T[(zero + e) * n + i] = T[(zero + e + 1) * n + i] / base[f][i];
    }
    rows.resize(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        rows[t].coeff = terms_[t].coeff;
        rows[t].j = terms_[t].j;
        for (int f = 0; f < 6; ++f) rows[t].row[f] = tab[f].data() + (terms_[t].e[f] - lo_[f]) * n;
    }
    const std::size_t nj = static_cast<std::size_t>(max_j_ + 1);
    b.assign(nj * n, 0.0);
    babs.assign(nj * n, 0.0);
    comp.assign(nj * n, 0.0);
    K.accumulate(rows.data(), rows.size(), n, b.data(), comp.data(), babs.data());
    for (std::size_t i = 0; i < nj * n; ++i) b[i] += comp[i];
}

int CompiledSum::eval_M(const double* x, std::size_t n, std::complex<double> tau, std::complex<double>* M) const {
    thread_local std::vector<double> b, babs;
    eval_b(x, n, b, babs);
    const std::complex<double> itau = 1.0 / tau;
    const double aitau = std::abs(itau);
    int redone = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> acc = 0.0, pw = 1.0;
        double bound = 0.0, apw = 1.0;
        for (int j = 0; j <= max_j_; ++j) {
            acc += pw * b[j * n + i];
            bound += apw * babs[j * n + i];
            pw *= itau;
            apw *= aitau;
        }
        // each product carries ~7 roundings; compensation removes the summation error
        const double err = 8.0 * std::numeric_limits<double>::epsilon() * bound;
        if (err > kCancellationTol * std::abs(acc)) {
            acc = eval_M_extended(x[i], tau);
            ++redone;
        }
        M[i] = acc;
    }
    return redone;
}

std::complex<double> CompiledSum::eval_M_extended(double xd, std::complex<double> tau) const {
    const mp x = xd;
    const mp em1 = exp(-x), em2 = em1 * em1;
    mp base[6];
    base[kP] = x;
    base[kSh] = (1 - em2) / 2;
    base[kCh] = (1 + em2) / 2;
    base[kSh2] = (1 - em1) / 2;
    base[kCh2] = (1 + em1) / 2;
    base[kV] = exp(-x / 2);
    const mp tr = tau.real(), ti = tau.imag();
    const mp den = tr * tr + ti * ti;
    const mp ir = tr / den, ii = -ti / den;
    std::vector<mp> bj(max_j_ + 1, mp(0));
    for (const auto& t : terms_) {
        mp v = mp(numerator(t.exact)) / mp(denominator(t.exact));
        for (int f = 0; f < 6; ++f) {
            if (t.e[f] > 0)
                v *= pow(base[f], t.e[f]);
            else if (t.e[f] < 0)
                v /= pow(base[f], -t.e[f]);
        }
        bj[t.j] += v;
    }
    mp re = 0, im = 0, pr = 1, pi = 0;
    for (int j = 0; j <= max_j_; ++j) {
        re += pr * bj[j];
        im += pi * bj[j];
        const mp nr = pr * ir - pi * ii;
        const mp ni = pr * ii + pi * ir;
        pr = nr;
        pi = ni;
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

Scaled CompiledSum::eval_scaled(double x, std::complex<double> tau) const {
    std::complex<double> M;
    eval_M(&x, 1, tau, &M);
    const std::complex<double> ex = -x * x / (4.0 * tau) + 0.5 * e2max_ * x;
    return (Scaled::exp_of(ex) * M);
}

}  // namespace drk
