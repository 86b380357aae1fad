#include "drk/symbolic.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "drk/quadrature.hpp"

namespace drk {

SymbolicSum::SymbolicSum(const std::vector<Monomial>& terms) {
    for (const auto& t : terms) add(t);
}

void SymbolicSum::add(const Monomial& m) {
    if (m.coeff == 0) return;
    auto key = m.key();
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, m.coeff);
        return;
    }
    it->second += m.coeff;
    if (it->second == 0) terms_.erase(it);
}

SymbolicSum SymbolicSum::operator+(const SymbolicSum& o) const {
    SymbolicSum out = *this;
    for (const auto& t : o.terms()) out.add(t);
    return out;
}

std::vector<Monomial> SymbolicSum::terms() const {
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto& [k, c] : terms_) out.push_back(Monomial{c, k[0], k[1], k[2], k[3], k[4], k[5]});
    return out;
}

int SymbolicSum::max_j() const {
    int m = 0;
    for (const auto& [k, c] : terms_) m = std::max(m, k[1]);
    return m;
}

int SymbolicSum::min_j() const {
    int m = terms_.empty() ? 0 : terms_.begin()->first[1];
    for (const auto& [k, c] : terms_) m = std::min(m, k[1]);
    return m;
}

SymbolicSum SymbolicSum::canonical() const { return SymbolicSum(terms()); }

SymbolicSum gaussian_seed() {
    Monomial m;
    m.coeff = 1;
    return SymbolicSum({m});
}

namespace {

// d/dr of one monomial times the Gaussian, divided by the Gaussian.
void differentiate(const Monomial& t, SymbolicSum& out) {
    auto push = [&](Monomial m) { out.add(m); };
    if (t.p > 0) {
        Monomial m = t;
        m.coeff *= t.p;
        m.p -= 1;
        push(m);
    }
    if (t.e_sh != 0) {
        Monomial m = t;
        m.coeff *= t.e_sh;
        m.e_sh -= 1;
        m.e_ch += 1;
        push(m);
    }
    if (t.e_ch != 0) {
        Monomial m = t;
        m.coeff *= t.e_ch;
        m.e_ch -= 1;
        m.e_sh += 1;
        push(m);
    }
    if (t.e_sh2 != 0) {
        Monomial m = t;
        m.coeff *= Rational(t.e_sh2, 2);
        m.e_sh2 -= 1;
        m.e_ch2 += 1;
        push(m);
    }
    if (t.e_ch2 != 0) {
        Monomial m = t;
        m.coeff *= Rational(t.e_ch2, 2);
        m.e_ch2 -= 1;
        m.e_sh2 += 1;
        push(m);
    }
    // Gaussian chain rule: -r/(2 tau)
    Monomial g = t;
    g.coeff *= Rational(-1, 2);
    g.p += 1;
    g.j += 1;
    push(g);
}

SymbolicSum apply_D(const SymbolicSum& s, bool half) {
    SymbolicSum d;
    for (const auto& t : s.terms()) differentiate(t, d);
    SymbolicSum out;
    for (auto t : d.terms()) {
        t.coeff = -t.coeff;
        if (half)
            t.e_sh2 -= 1;
        else
            t.e_sh -= 1;
        out.add(t);
    }
    return out;
}

}  // namespace

SymbolicSum apply_D1(const SymbolicSum& s) { return apply_D(s, false); }
SymbolicSum apply_D2(const SymbolicSum& s) { return apply_D(s, true); }

SymbolicSum operator_chain(int p_d2, int q_d1) {
    SymbolicSum s = gaussian_seed();
    for (int i = 0; i < p_d2; ++i) s = apply_D2(s);
    for (int i = 0; i < q_d1; ++i) s = apply_D1(s);
    return s;
}

SymbolicSum inverse_abel_chain(const SpaceParams& p) {
    if (p.k % 2 != 0) throw std::invalid_argument("inverse_abel_chain: k must be even");
    return operator_chain(p.m / 2, p.k / 2);
}

SymbolicSum odd_chain(const SpaceParams& p) {
    if (p.k % 2 == 0) throw std::invalid_argument("odd_chain: k must be odd");
    return operator_chain(p.m / 2, (p.k + 1) / 2);
}

SymbolicSum kernel_chain(const SpaceParams& p) { return p.k % 2 == 0 ? inverse_abel_chain(p) : odd_chain(p); }

namespace {

double term_value(const Exponents& e, double r) {
    const double sh = std::sinh(r), ch = std::cosh(r), sh2 = std::sinh(0.5 * r), ch2 = std::cosh(0.5 * r);
    return std::pow(r, e[0]) * std::pow(sh, e[2]) * std::pow(ch, e[3]) * std::pow(sh2, e[4]) * std::pow(ch2, e[5]);
}

}  // namespace

std::complex<double> evaluate(const SymbolicSum& s, double r, std::complex<double> tau, double r_min) {
    if (r < r_min) throw std::domain_error("evaluate: r below r_min");
    if (tau == 0.0) throw std::domain_error("evaluate: tau == 0");
    quad::Neumaier<std::complex<double>> acc;
    const std::complex<double> itau = 1.0 / tau;
    for (const auto& [e, c] : s.raw()) {
        const double coeff = static_cast<double>(c);
        acc.add(coeff * term_value(e, r) * std::pow(itau, e[1]));
    }
    return acc.value() * std::exp(-r * r * itau / 4.0);
}

double evaluate_aj(const SymbolicSum& s, int j, double r) {
    quad::Neumaier<double> acc;
    for (const auto& [e, c] : s.raw())
        if (e[1] == j) acc.add(static_cast<double>(c) * term_value(e, r));
    return acc.value();
}

std::string to_json(const SymbolicSum& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [e, c] : s.raw()) {
        arr.push_back({{"coeff", c.str()},
                       {"p", e[0]},
                       {"j", e[1]},
                       {"e_sh", e[2]},
                       {"e_ch", e[3]},
                       {"e_sh2", e[4]},
                       {"e_ch2", e[5]}});
    }
    return arr.dump();
}

}  // namespace drk
