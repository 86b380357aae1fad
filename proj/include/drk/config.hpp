#pragma once

#include <complex>
#include <string>
#include <vector>

namespace drk {

// Flat key-value file with [sections]:
//   [space] m, k, instance      [grids] r_min, r_max, r_steps, taus, t_min, t_max, t_steps, s_max
//   [tolerances] quad, ode, fit [output] dir, csv, json          [run] threads
// taus is a comma list of re:im pairs.
struct RunConfig {
    int m = 2;
    int k = 1;
    std::string instance;  // "heisenberg:d" etc., optional

    double r_min = 1e-3;
    double r_max = 30.0;
    int r_steps = 40;
    std::vector<std::complex<double>> taus{{1.0, 0.0}};
    double t_min = 0.02;
    double t_max = 0.8;
    int t_steps = 21;
    double s_max = 0.0;  // 0: automatic

    double quad_tol = 1e-10;
    double ode_tol = 1e-12;
    double fit_tol = 0.05;

    std::string output_dir = ".";
    std::string csv;
    std::string json;
    int threads = 0;  // 0: DRK_THREADS or hardware

    // Throws std::invalid_argument on nonpositive tolerances, empty grids, bad ranges.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string to_ini(const RunConfig& c);

std::vector<std::complex<double>> parse_tau_list(const std::string& s);
std::string format_tau_list(const std::vector<std::complex<double>>& taus);

}  // namespace drk
