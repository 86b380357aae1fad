#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace drk::quad {

using cplx = std::complex<double>;

template <class T>
struct Neumaier {
    T sum{};
    T comp{};
    void add(T x) {
        if constexpr (std::is_same_v<T, double>) {
            const double t = sum + x;
            if (std::abs(sum) >= std::abs(x))
                comp += (sum - t) + x;
            else
                comp += (x - t) + sum;
            sum = t;
        } else {
            Neumaier<double> re{sum.real(), comp.real()}, im{sum.imag(), comp.imag()};
            re.add(x.real());
            im.add(x.imag());
            sum = {re.sum, im.sum};
            comp = {re.comp, im.comp};
        }
    }
    T value() const { return sum + comp; }
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    long evals = 0;
};

struct CResult {
    cplx value{};
    double error = 0.0;
    bool converged = false;
    long evals = 0;
};

// Fills y[i] = f(x[i]) for i < n.
using BatchFn = std::function<void(const double* x, cplx* y, std::size_t n)>;
using RealFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7/15 with global bisection of the worst interval.
CResult gk_adaptive(const BatchFn& f, double a, double b, double abs_tol, double rel_tol,
                    int max_intervals = 4000);
Result gk_adaptive(const RealFn& f, double a, double b, double abs_tol, double rel_tol,
                   int max_intervals = 4000);

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre on [-1,1]; n in {7, 10, 15, 20, 30}.
const Rule& gauss_legendre(int n);

// Appends composite GL nodes/weights for [a,b], panels of width <= h.
void composite_gl(double a, double b, double h, int n, std::vector<double>& x, std::vector<double>& w);

enum class Backend { gauss_kronrod, double_exponential };

// int_a^inf f. gauss_kronrod: unit-ish panels until the tail is negligible;
// double_exponential: boost exp_sinh.
Result integrate_half_line(const RealFn& f, double a, Backend backend, double rel_tol,
                           double r_cap = 400.0);
// int_a^b f with either backend (boost tanh_sinh for double_exponential).
Result integrate_interval(const RealFn& f, double a, double b, Backend backend, double rel_tol);

// Wynn epsilon over a sliding window of partial sums.
class WynnEpsilon {
public:
    explicit WynnEpsilon(std::size_t window = 24) : window_(window) {}
    // Returns current accelerated estimate.
    cplx push(cplx partial_sum);
    cplx estimate() const { return est_; }
    // |difference| between the two most recent accelerated estimates.
    double spread() const { return spread_; }
    std::size_t count() const { return total_; }

private:
    std::size_t window_;
    std::vector<cplx> s_;
    cplx est_{};
    cplx prev_est_{};
    double spread_ = 0.0;
    std::size_t total_ = 0;
};

// Neville extrapolation of samples (x_i, y_i) to x = 0; err = last correction size.
cplx extrapolate_to_zero(const std::vector<double>& x, const std::vector<cplx>& y, double* err = nullptr);

// Least-squares line fit y = a + b x.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace drk::quad
