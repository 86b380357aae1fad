#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "drk/geometry.hpp"
#include "drk/scaled.hpp"
#include "drk/simd/kernels.hpp"

namespace drk {

using Rational = boost::multiprecision::cpp_rational;

// Exponent tuple (p, j, e_sh, e_ch, e_sh2, e_ch2):
// r^p tau^{-j} sinh^{e_sh}(r) cosh^{e_ch}(r) sinh^{e_sh2}(r/2) cosh^{e_ch2}(r/2)
using Exponents = std::array<int, 6>;

struct Monomial {
    Rational coeff;
    int p = 0;
    int j = 0;
    int e_sh = 0;
    int e_ch = 0;
    int e_sh2 = 0;
    int e_ch2 = 0;

    Exponents key() const { return {p, j, e_sh, e_ch, e_sh2, e_ch2}; }
};

// Finite sum of monomials times the implicit Gaussian factor exp(-r^2/(4 tau)).
class SymbolicSum {
public:
    SymbolicSum() = default;
    explicit SymbolicSum(const std::vector<Monomial>& terms);

    void add(const Monomial& m);
    SymbolicSum operator+(const SymbolicSum& o) const;
    bool operator==(const SymbolicSum& o) const { return terms_ == o.terms_; }

    std::vector<Monomial> terms() const;
    std::size_t size() const { return terms_.size(); }
    int max_j() const;
    int min_j() const;
    // Re-canonicalize (identity on an already canonical sum).
    SymbolicSum canonical() const;

    const std::map<Exponents, Rational>& raw() const { return terms_; }

private:
    std::map<Exponents, Rational> terms_;
};

SymbolicSum gaussian_seed();
// -(1/sinh r) d/dr
SymbolicSum apply_D1(const SymbolicSum& s);
// -(1/sinh(r/2)) d/dr
SymbolicSum apply_D2(const SymbolicSum& s);
// D1^q D2^p applied to the seed (D2 steps first).
SymbolicSum operator_chain(int p_d2, int q_d1);
// D1^{k/2} D2^{m/2}(seed), even k only.
SymbolicSum inverse_abel_chain(const SpaceParams& p);
// D1^{(k+1)/2} D2^{m/2}(seed), integrand of the odd-k path.
SymbolicSum odd_chain(const SpaceParams& p);
// Picks the chain matching the parity of k.
SymbolicSum kernel_chain(const SpaceParams& p);

constexpr double kDefaultRMin = 1e-3;

// Value including the Gaussian factor. Throws std::domain_error for r < r_min or tau == 0.
std::complex<double> evaluate(const SymbolicSum& s, double r, std::complex<double> tau, double r_min = kDefaultRMin);
// Value of the j-th coefficient function a_j(r) (no Gaussian, no tau power).
double evaluate_aj(const SymbolicSum& s, int j, double r);

std::string to_json(const SymbolicSum& s);

// Floating-point form of a SymbolicSum for batch evaluation in a log-scaled frame.
// With v = e^{-x/2}: sinh x = e^x sh_hat, cosh x = e^x ch_hat, sinh(x/2) = e^{x/2} sh2_hat,
// cosh(x/2) = e^{x/2} ch2_hat. Each term grows like e^{E2 x/2} with
// E2 = 2 e_sh + 2 e_ch + e_sh2 + e_ch2; the largest E2 is factored out, leaving
// b_hat_j(x) = sum coeff x^p sh_hat^a ch_hat^b sh2_hat^c ch2_hat^d v^{E2max - E2}.
// The chain value is exp(-x^2/(4 tau) + E2max x/2) * sum_j tau^{-j} b_hat_j(x).
class CompiledSum {
public:
    CompiledSum() = default;
    explicit CompiledSum(const SymbolicSum& s);

    int e2max() const { return e2max_; }
    int max_j() const { return max_j_; }
    std::size_t size() const { return terms_.size(); }

    // b[j*n+i] = b_hat_j(x_i), babs = sum of |term| per j (cancellation gauge).
    void eval_b(const double* x, std::size_t n, std::vector<double>& b, std::vector<double>& babs,
                const simd::Kernels* kern = nullptr) const;
    // M(x_i) = sum_j tau^{-j} b_hat_j(x_i); nodes with heavy cancellation are redone in
    // 50-digit arithmetic. Returns the number of such nodes.
    int eval_M(const double* x, std::size_t n, std::complex<double> tau, std::complex<double>* M) const;
    std::complex<double> eval_M_extended(double x, std::complex<double> tau) const;
    // Full chain value including the Gaussian, in scaled form.
    Scaled eval_scaled(double x, std::complex<double> tau) const;

    // Relative error threshold that triggers the extended-precision path.
    static constexpr double kCancellationTol = 1e-12;

private:
    struct Term {
        double coeff;
        Rational exact;
        int j;
        int e[6];  // p, sh_hat, ch_hat, sh2_hat, ch2_hat, v
    };
    std::vector<Term> terms_;
    int lo_[6] = {0, 0, 0, 0, 0, 0};
    int hi_[6] = {0, 0, 0, 0, 0, 0};
    int e2max_ = 0;
    int max_j_ = 0;
};

}  // namespace drk
