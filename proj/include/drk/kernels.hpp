#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "drk/geometry.hpp"
#include "drk/scaled.hpp"
#include "drk/symbolic.hpp"

namespace drk {

using cplx = std::complex<double>;

class ComplexTime {
public:
    // Throws std::invalid_argument unless tau != 0 and Re tau >= 0.
    ComplexTime(cplx tau);  // NOLINT(google-explicit-constructor)
    ComplexTime(double re) : ComplexTime(cplx(re, 0.0)) {}  // NOLINT(google-explicit-constructor)
    ComplexTime(double re, double im) : ComplexTime(cplx(re, im)) {}
    cplx value() const { return tau_; }
    double modulus() const { return std::abs(tau_); }
    double phase() const { return std::arg(tau_); }

private:
    cplx tau_;
};

enum class KernelMethod { even_closed_form, odd_quadrature };
const char* method_name(KernelMethod m);

struct KernelValue {
    Scaled scaled;
    cplx value{};
    double r = 0.0;
    cplx tau{};
    KernelMethod method = KernelMethod::even_closed_form;
    double quad_error = 0.0;  // relative error estimate (0 on the closed-form path)
    bool converged = true;
    int cells = 0;
};

struct OddIntegralResult {
    Scaled value;        // int_r^inf G dnu
    double rel_error = 0.0;
    bool converged = false;
    int cells = 0;
    long evals = 0;
};

struct OddIntegralOptions {
    double tol = 1e-12;
    int max_cells = 40000;
};

// Evaluates h_tau(r) for one space; immutable after construction, safe to share.
class KernelEvaluator {
public:
    explicit KernelEvaluator(const SpaceParams& p);

    const SpaceParams& params() const { return p_; }
    // C in h = C (4 pi tau)^{-1/2} e^{-Q^2 tau/4} * (chain or odd integral)
    double constant() const { return C_; }
    const CompiledSum& chain() const { return chain_; }

    KernelValue h(cplx tau, double r, double tol = 1e-12) const;
    OddIntegralResult odd_integral(cplx tau, double r, const OddIntegralOptions& opt = {}) const;

    double r_min = kDefaultRMin;

private:
    SpaceParams p_;
    CompiledSum chain_;
    double C_;
};

// Shared evaluator per (m, k).
const KernelEvaluator& evaluator_for(const SpaceParams& p);

double kernel_constant(const SpaceParams& p);

KernelValue kernel_h(const SpaceParams& p, ComplexTime tau, double r, double tol = 1e-12);
OddIntegralResult odd_k_integral(const SpaceParams& p, ComplexTime tau, double r, double tol);
KernelValue schrodinger_kernel(const SpaceParams& p, double t, double r, double tol = 1e-12);

Scaled sigma_kernel_scaled(const SpaceParams& p, double t, const GroupPoint& x, double tol = 1e-12);
cplx sigma_kernel(const SpaceParams& p, double t, const GroupPoint& x, double tol = 1e-12);

enum class Regime { small, large };

struct BoundEnvelope {
    Regime regime = Regime::small;
    double log_value = 0.0;
    double value() const { return std::exp(log_value); }
};

BoundEnvelope upper_bound_envelope(const SpaceParams& p, ComplexTime tau, double r);
// Throws std::domain_error when r <= 1 + c t.
double log_lower_bound_envelope(const SpaceParams& p, double t, double r, double c = 4.0);
double lower_bound_envelope(const SpaceParams& p, double t, double r, double c = 4.0);

struct KernelGridRow {
    double r;
    cplx tau;
    KernelValue v;
};

struct KernelGrid {
    SpaceParams params;
    std::vector<KernelGridRow> rows;
};

KernelGrid kernel_grid(const SpaceParams& p, const std::vector<double>& r_values, const std::vector<cplx>& taus,
                       double tol = 1e-12);

}  // namespace drk
