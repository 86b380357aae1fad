#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace drk {

struct SpaceParams {
    int m = 2;
    int k = 0;
    double Q = 1.0;  // (m+2k)/2
    int n = 3;       // m+k+1
};

// Throws std::invalid_argument for odd/nonpositive m or negative k.
SpaceParams space_params(int m, int k);

struct GroupPoint {
    std::vector<double> X;
    std::vector<double> Z;
    double a = 1.0;
};

// Structure matrices J_l (one per basis vector of z), row-major m x m.
// [X,Y]_l = <J_l X, Y>.
struct HTypeInstance {
    SpaceParams params;
    std::vector<std::vector<double>> J;
    std::string name;

    std::vector<double> bracket(const std::vector<double>& X, const std::vector<double>& Y) const;
    // J_Z X for arbitrary (not necessarily unit) Z.
    std::vector<double> apply_J(const std::vector<double>& Z, const std::vector<double>& X) const;
};

HTypeInstance heisenberg_instance(int d);     // m = 2d, k = 1
HTypeInstance quaternionic_instance(int d);   // m = 4d, k = 3
HTypeInstance abelian_instance(int m);        // k = 0
// "heisenberg:d", "quaternionic:d", "abelian:m"
HTypeInstance instance_by_name(const std::string& spec);

// Max deviation from J_Z^T J_Z = |Z|^2 I and from skewness, for the given Z.
double htype_defect(const HTypeInstance& inst, const std::vector<double>& Z);

GroupPoint identity_point(const SpaceParams& p);
GroupPoint group_product(const HTypeInstance& inst, const GroupPoint& x, const GroupPoint& y);
GroupPoint group_inverse(const GroupPoint& x);

// Asserts the arccosh argument is >= 1 (never clamps below 1 - 1e-12).
double distance_to_identity(const SpaceParams& p, const GroupPoint& x);
double distance(const HTypeInstance& inst, const GroupPoint& x, const GroupPoint& y);

double density_A(const SpaceParams& p, double r);
double log_density_A(const SpaceParams& p, double r);
// A'/A
double density_log_derivative(const SpaceParams& p, double r);
double volume_V(const SpaceParams& p, double r);

double modular_delta(const SpaceParams& p, const GroupPoint& x);
// q must be finite and >= 2.
double weight_delta_q(const SpaceParams& p, double q, const GroupPoint& x);

// Radial integration in coordinates: int f dlambda = haar_radial_factor(p) * int f A dr.
double haar_radial_factor(const SpaceParams& p);

struct RadialFunction {
    std::function<std::complex<double>(double)> eval;
    double r_min = 0.0;
    // Caller-declared decay: |f(r)| <~ exp(-decay_rate r) for large r.
    double decay_rate = 0.0;
};

struct NormResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    double r_reached = 0.0;
};

NormResult lq_norm_left(const SpaceParams& p, const RadialFunction& f, double q, double rel_tol = 1e-10,
                        double r_cap = 400.0);

// Factorized Gaussian test function f = g1(X) g2(Z) g3(a), g1 = exp(-|X|^2/(2 sx^2)),
// g2 = exp(-|Z|^2/(2 sz^2)), g3 = exp(-(log a - mu)^2/(2 sa^2)).
struct FactorizedGaussian {
    double sx = 1.0;
    double sz = 1.0;
    double mu = 0.0;
    double sa = 1.0;
};

struct WeightedNormPair {
    double lhs = 0.0;  // ||delta^{-1/2} f||_{L^q(lambda)}
    double rhs = 0.0;  // ||f||_{L^q(delta_q rho)}
};

WeightedNormPair weighted_norm_identity(const SpaceParams& p, const FactorizedGaussian& f, double q);

}  // namespace drk
