#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "drk/errors.hpp"
#include "drk/geometry.hpp"

namespace drk {

using cplx = std::complex<double>;

inline constexpr double kDefaultOdeTol = 1e-12;

// Radial solution of u'' + (A'/A) u' + (s^2 + Q^2/4) u = 0, u(0) = 1, stored as
// y = e^{Qr/2} u on a uniform grid with septic Hermite interpolation.
class SphericalProfile {
public:
    SphericalProfile(const SpaceParams& p, double s, double r_max, double ode_tol = kDefaultOdeTol);

    double s() const { return s_; }
    double r_max() const { return r_max_; }
    double ode_tolerance() const { return tol_; }
    long steps() const { return steps_; }

    double phi(double r) const;
    // e^{Qr/2} phi_s(r) and its r-derivative
    double scaled(double r) const;
    double scaled_derivative(double r) const;

private:
    void hermite(double r, double& y, double& dy) const;
    void taylor(double r, double& u, double& du) const;

    SpaceParams p_;
    double s_, r_max_, tol_;
    double r0_, h_;
    double lam_, a2_, a4_;  // Taylor u = 1 + a2 r^2 + a4 r^4
    std::vector<double> y_, dy_, d2y_, d3y_;
    long steps_ = 0;
};

// Cached profile covering at least [0, r_max]; key includes the tolerance.
std::shared_ptr<const SphericalProfile> spherical_profile(const SpaceParams& p, double s, double r_max,
                                                          double ode_tol = kDefaultOdeTol);

struct SphericalSolution {
    SpaceParams params;
    double s = 0.0;
    double ode_tolerance = kDefaultOdeTol;
    std::vector<double> r;
    std::vector<double> samples;  // phi_s(r)
    std::shared_ptr<const SphericalProfile> profile;
};

// r_grid must start at 0.
SphericalSolution phi(const SpaceParams& p, double s, const std::vector<double>& r_grid,
                      double ode_tol = kDefaultOdeTol);

// The e^{-r} corrections to the two-term asymptotics leave ~1e-11 relative bias on a
// [25, 40] window; [45, 60] puts them below rounding.
struct CFunctionOptions {
    double r_lo = 45.0;
    double r_hi = 60.0;
    double ode_tol = kDefaultOdeTol;
    double residual_threshold = 1e-6;
};

struct CFunctionEstimate {
    double s = 0.0;
    cplx c_plus{};
    cplx c_minus{};
    double residual = 0.0;
    double plancherel_density = 0.0;
    bool reliable = false;
    int pairs = 0;
};

// Fits e^{Qr/2} phi_s ~ c+ e^{isr} + c- e^{-isr} on [r_lo, r_hi]. Two-point pairs with
// |sin(s dr)| >= 1/2 when the window allows, value/derivative pairs below that.
CFunctionEstimate c_function(const SpaceParams& p, double s, const CFunctionOptions& opt = {});
// Cached density |c+|^{-2} at the default window.
double plancherel_density(const SpaceParams& p, double s, double ode_tol = kDefaultOdeTol);

struct TransformOptions {
    double tol = 1e-10;
    double ode_tol = kDefaultOdeTol;
    double r_cap = 400.0;
};

struct TransformResult {
    std::vector<double> s;
    std::vector<cplx> value;
    std::vector<double> error;  // absolute, from grid halving
    double r_max = 0.0;
    std::size_t nodes = 0;
    bool converged = false;
};

// H f(s) = int_0^inf f phi_s A dr for all s at once; f is sampled once per grid level.
TransformResult spherical_transform(const SpaceParams& p, const RadialFunction& f, const std::vector<double>& s,
                                    const TransformOptions& opt = {});
cplx spherical_transform(const SpaceParams& p, const RadialFunction& f, double s, const TransformOptions& opt = {});

struct SphericalCalibration {
    double c_S = 0.0;
    double reference_error = 0.0;  // worst relative error over the validation radii
    double ode_tol = kDefaultOdeTol;
    bool valid = false;
};

using SpectralFn = std::function<cplx(double)>;
// Evaluates a spectral function on a whole node list at once.
using SpectralBatchFn = std::function<std::vector<cplx>(const std::vector<double>&)>;

struct InverseOptions {
    double tol = 1e-10;
    double ode_tol = kDefaultOdeTol;
    double s_max = 0.0;  // 0: scan Hf for a cutoff
};

// c_S int_0^inf Hf(s) phi_s(r) density(s) ds for every r.
std::vector<cplx> inverse_spherical(const SpaceParams& p, const SphericalCalibration& cal, const SpectralFn& Hf,
                                    const std::vector<double>& r, const InverseOptions& opt = {});
std::vector<cplx> inverse_spherical(const SpaceParams& p, const SphericalCalibration& cal, const SpectralBatchFn& Hf,
                                    const std::vector<double>& r, const InverseOptions& opt = {});
cplx inverse_spherical(const SpaceParams& p, const SphericalCalibration& cal, const SpectralFn& Hf, double r,
                       const InverseOptions& opt = {});

// Chooses c_S so that the inverse of e^{-Q^2 tau/4} e^{-tau s^2} equals the kernel at r = 2;
// tau_ref = 1 by default. Throws NumericFailure if validation at other radii exceeds 1e-4.
SphericalCalibration calibrate(const SpaceParams& p, double tau_ref = 1.0, double ode_tol = kDefaultOdeTol);
const SphericalCalibration& calibration_for(const SpaceParams& p);

// Fixed spectral/radial quadrature with the profiles tabulated; forward and inverse
// transforms become dense products (compensated, SIMD-dispatched dots).
class SpectralBasis {
public:
    SpectralBasis(const SpaceParams& p, double s_max, double r_max, double ode_tol = kDefaultOdeTol);

    const SpaceParams& params() const { return p_; }
    const std::vector<double>& s() const { return s_; }
    const std::vector<double>& s_weights() const { return ws_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& r_weights() const { return wr_; }
    const std::vector<double>& density() const { return dens_; }
    // e^{-Qr} A(r) at the radial nodes
    const std::vector<double>& scaled_density_A() const { return At_; }
    double c_S() const { return cS_; }
    double ode_tolerance() const { return ode_tol_; }

    // input: ftilde = e^{Qr/2} f at r-nodes
    std::vector<cplx> forward(const std::vector<cplx>& ftilde) const;
    // output: e^{Qr/2} u at r-nodes
    std::vector<cplx> inverse(const std::vector<cplx>& Hf) const;
    // e^{Qr/2} u at arbitrary radii
    std::vector<cplx> inverse_at(const std::vector<cplx>& Hf, const std::vector<double>& r) const;

    // scaled profiles at fixed extra radii, row-major [s][r]; one ODE solve per node,
    // then every inverse on those radii is a dense product
    struct Table {
        std::vector<double> r;
        std::vector<double> Y;
    };
    Table tabulate(const std::vector<double>& r) const;
    std::vector<cplx> inverse(const Table& t, const std::vector<cplx>& Hf) const;
    // (int |u|^2 A dr)^{1/2} from ftilde on the r-nodes
    double l2_norm(const std::vector<cplx>& ftilde) const;

private:
    SpaceParams p_;
    std::vector<double> s_, ws_, r_, wr_, dens_, At_;
    std::vector<double> Y_;  // row-major [s][r], scaled profiles
    double cS_;
    double ode_tol_;
};

}  // namespace drk
