#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "drk/geometry.hpp"
#include "drk/spherical.hpp"

namespace drk {

// Factor applied to Hf(s); m(-Delta_Q) acts as s -> m(s^2 + Q^2/4).
struct Multiplier {
    std::function<cplx(double)> eval;
    std::string descriptor;
};

Multiplier identity_multiplier();
// e^{-it(s^2 + Q^2/4)}
Multiplier schrodinger_multiplier(const SpaceParams& p, double t);
// e^{-tau(s^2 + Q^2/4)}
Multiplier heat_multiplier(const SpaceParams& p, cplx tau);
Multiplier compose(const Multiplier& a, const Multiplier& b);
// sup |m| over a uniform sample of [0, s_max]
double multiplier_sup(const Multiplier& m, double s_max, int samples = 2001);

struct CalculusOptions {
    double s_max = 0.0;  // 0: from the decay of Hf
    double r_max = 0.0;  // 0: support of f plus the travel distance 2 s_max t_max
    double tol = 1e-10;
    double ode_tol = kDefaultOdeTol;
};

// Spectral data of one radial function on a fixed basis: Hf at the s-nodes, and the
// dense forward/inverse products that turn multipliers into radial functions.
class RadialCalculus {
public:
    RadialCalculus(const SpaceParams& p, const RadialFunction& f, double t_max = 0.0,
                   const CalculusOptions& opt = {});

    const SpaceParams& params() const { return basis_->params(); }
    const SpectralBasis& basis() const { return *basis_; }
    const std::vector<cplx>& spectrum() const { return Hf_; }
    double f_l2() const { return f_l2_; }

    std::vector<cplx> times(const Multiplier& m) const;
    // Hg for another function on the same basis
    std::vector<cplx> transform(const RadialFunction& g) const;
    // e^{Qr/2} u on the basis r-nodes
    std::vector<cplx> nodes(const std::vector<cplx>& spec) const;
    // u at arbitrary radii (unscaled)
    std::vector<cplx> at(const std::vector<cplx>& spec, const std::vector<double>& r) const;
    // L^q norm of u given e^{Qr/2} u on the r-nodes; q = inf is the sup over the nodes
    double lq(const std::vector<cplx>& scaled_nodes, double q) const;

private:
    std::shared_ptr<const SpectralBasis> basis_;
    std::vector<cplx> Hf_;
    double f_l2_ = 0.0;
    double r_lo_ = 0.0;
};

// Radial function with H(result) = m * Hf; evaluation is an inverse transform per call.
RadialFunction apply_multiplier(const SpaceParams& p, const Multiplier& m, const RadialFunction& f,
                                const CalculusOptions& opt = {});

struct EvolutionRecord {
    SpaceParams params;
    std::string data;  // initial data descriptor
    std::vector<double> t;
    std::vector<double> r;  // output grid
    std::vector<std::vector<cplx>> u;  // u[ti][ri]
    // quadrature view of the same solution
    std::shared_ptr<const RadialCalculus> calculus;
    std::vector<std::vector<cplx>> u_nodes;  // e^{Qr/2} u at basis r-nodes
    // conserved-quantity log
    double l2_initial = 0.0;
    std::vector<double> l2;
    double max_l2_drift = 0.0;
    double duhamel_error = 0.0;  // inhomogeneous only: trapezoid vs half-grid estimate

    double lq_norm(std::size_t ti, double q) const;
};

struct EvolutionOptions {
    CalculusOptions calculus;
    double r_out_max = 20.0;
    int r_out_steps = 81;
};

EvolutionRecord evolve_schrodinger(const SpaceParams& p, const RadialFunction& f, const std::vector<double>& t_grid,
                                   const EvolutionOptions& opt = {}, const std::string& descriptor = "radial");

// Distinguished-Laplacian evolution through the delta-twist: the record keeps the radial
// core v(t) = e^{it Delta_S} (delta^{-1/2} f core); on the slice x = (0, 0, a)
// u(t, x) = e^{iQ^2 t/4} a^{-Q/2} v(t, |log a|).
struct DistinguishedRecord {
    EvolutionRecord core;
    // u(t_i, (0,0,a)) evaluated through the calculus
    cplx on_slice(std::size_t ti, double a) const;
    std::vector<cplx> on_slice(std::size_t ti, const std::vector<double>& a) const;
};

DistinguishedRecord evolve_distinguished(const SpaceParams& p, const RadialFunction& core,
                                         const std::vector<double>& t_grid, const EvolutionOptions& opt = {},
                                         const std::string& descriptor = "radial");

struct AdmissiblePair {
    double p = 2.0;  // may be +inf
    double q = 2.0;
};

// (1/p, 1/q) in (0, 1/2] x (0, 1/2) with 2/p + n/q >= n/2, or the point (0, 1/2).
bool is_admissible(const SpaceParams& p, const AdmissiblePair& pair);
bool is_admissible(int n, const AdmissiblePair& pair);
// Same predicate in (1/p, 1/q) coordinates. The closed edge 2/p + n/q = n/2 is taken with a
// 1e-12 allowance so reciprocals that round across it still count.
bool is_admissible_reciprocal(int n, double inv_p, double inv_q);

struct TimeWindow {
    double t0 = 0.0;
    double t1 = 1.0;
};

// (int_window ||u(t)||_q^p dt)^{1/p}, trapezoid over the record's time grid (linear
// interpolation of the integrand at window ends); p = inf is the max over the window.
// Throws invalid_argument for inadmissible pairs unless check_admissible is false.
double strichartz_window_norm(const EvolutionRecord& rec, const AdmissiblePair& pair, const TimeWindow& w,
                              bool check_admissible = true);

// Time-indexed radial forcing F(t, r).
using Forcing = std::function<cplx(double t, double r)>;

// u(t) = e^{it Delta} f + int_0^t e^{i(t-s) Delta} F(s) ds, trapezoid in s on t_grid
// (t_grid must start at 0 and increase).
EvolutionRecord inhomogeneous_solution(const SpaceParams& p, const RadialFunction& f, const Forcing& F,
                                       const std::vector<double>& t_grid, const EvolutionOptions& opt = {});

// max_r |i u_t + u_rr + (A'/A) u_r - i F| / max_r |u| by central differences (5-point in r).
double schrodinger_residual(const RadialCalculus& calc, double t, const std::vector<double>& r, double dt = 1e-3,
                            double dr = 1e-2);

// gaussian:sigma -> exp(-r^2/(2 sigma^2)); heat:tau -> h_tau
RadialFunction data_by_name(const SpaceParams& p, const std::string& spec);

}  // namespace drk
