#pragma once

#include <complex>
#include <string>
#include <vector>

#include "drk/geometry.hpp"
#include "drk/kernels.hpp"
#include "drk/quadrature.hpp"

namespace drk {

struct RegimeStat {
    Regime regime;
    double ratio = 0.0;  // sup (upper) or inf (lower) in this branch
    long points = 0;
};

struct BoundReport {
    std::string kind;  // "upper" or "lower"
    std::string grid;  // human-readable grid description
    double ratio = 0.0;  // sup_ratio for upper, inf_ratio for lower
    double refined_ratio = 0.0;
    double refinement_drift = 0.0;
    std::vector<RegimeStat> regimes;
    long points = 0;
    long excluded = 0;  // non-converged kernel values left out
    bool stable = false;  // drift <= 5%
    // lower bound only: inf ratio per trial c, and the smallest c still bounded away from 0
    std::vector<std::pair<double, double>> c_scan;
    double smallest_c = 0.0;
};

struct UpperGrid {
    double mod_min = 1e-2, mod_max = 1e2;
    int mod_steps = 17;  // log-uniform
    std::vector<double> thetas;  // default {0, +-pi/4, +-pi/2}
    double r_min = 1e-3, r_max = 30.0;
    int r_steps = 40;  // log-uniform below 1, uniform above
    UpperGrid refined() const;
    std::string describe() const;
};

BoundReport verify_upper_bound(const SpaceParams& p, const UpperGrid& grid = {}, double tol = 1e-10);

struct LowerGrid {
    std::vector<double> t = {0.5, 1.0, 2.0};
    double c = 4.0;
    double r_max = 30.0;
    int r_steps = 40;
    LowerGrid refined() const;
    std::string describe() const;
};

BoundReport verify_lower_bound(const SpaceParams& p, const LowerGrid& grid = {}, double tol = 1e-10);

enum class NormKind { strong, weak };

// (int |h_tau|^q A dr)^{1/q}; q = inf gives sup |h_tau| over r >= r_min. The weak kind
// is sup_r V(r)^{1/q} |h_tau(r)|.
double lq_kernel_norm(const SpaceParams& p, ComplexTime tau, double q, NormKind kind = NormKind::strong,
                      double tol = 1e-8, quad::Backend backend = quad::Backend::gauss_kronrod);
// Same integrals for a caller-supplied radial function.
double lq_norm(const SpaceParams& p, const RadialFunction& f, double q, NormKind kind = NormKind::strong,
               double tol = 1e-8, quad::Backend backend = quad::Backend::gauss_kronrod);

// (int |k|^{q/2} phi_0 A dr)^{2/q}; q = inf gives sup |k|.
double aq_norm(const SpaceParams& p, const RadialFunction& k, double q, double tol = 1e-8,
               quad::Backend backend = quad::Backend::gauss_kronrod);

enum class DecayNorm { lq, lq_weak, aq };

struct DecayFit {
    double q = 0.0;
    DecayNorm norm = DecayNorm::lq;
    std::vector<double> times;
    std::vector<double> norms;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double residual = 0.0;
    bool flagged = false;  // residual above threshold
};

struct DecayOptions {
    double t_min = 0.02, t_max = 0.8;
    int per_decade = 8;
    DecayNorm norm = DecayNorm::lq;
    double tol = 1e-8;
    double residual_threshold = 0.05;
};

// Slope of log ||s_t|| against log t on a log-uniform sample.
DecayFit decay_fit(const SpaceParams& p, double q, const DecayOptions& opt);
DecayOptions small_time_defaults();
DecayOptions large_time_defaults();

struct ConvolutionCheck {
    double ratio = 0.0;  // ||f*k||_q / (||k||_{A_q} ||f||_{q'})
    double conv_norm = 0.0;
    double k_aq = 0.0;
    double f_lqp = 0.0;
};

// f*k through the spherical transform (multiplier product, then inversion).
ConvolutionCheck convolution_check(const SpaceParams& p, const RadialFunction& f, const RadialFunction& k, double q,
                                   double tol = 1e-10, quad::Backend backend = quad::Backend::gauss_kronrod);

struct GrowthPoint {
    double a = 0.0;
    double log_inv_a = 0.0;
    double log_abs_sigma = 0.0;
};

struct GrowthFit {
    DecayFit fit;  // times = log(1/a), norms = |sigma_t(0,0,a)| (log-scale fit vs log log(1/a))
    std::vector<GrowthPoint> points;
    long rejected = 0;  // inside the excluded region
    double reference_log_abs = 0.0;  // log|sigma_t| at a = 0.1
    double max_growth = 0.0;  // max |sigma_t(a)| / |sigma_t(0.1)| over accepted points
};

GrowthFit weighted_growth_check(const SpaceParams& p, double t, const std::vector<double>& a_list,
                                double c = 4.0, double tol = 1e-10);
// a = e^{-L}, L log-uniform on [L_min, L_max]
std::vector<double> default_growth_list(double L_min = 10.0, double L_max = 400.0, int n = 24);

}  // namespace drk
