#include "drk/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "drk/acceptance.hpp"
#include "drk/config.hpp"
#include "drk/errors.hpp"
#include "drk/estimates.hpp"
#include "drk/kernels.hpp"
#include "drk/parallel.hpp"
#include "drk/propagator.hpp"
#include "drk/spherical.hpp"

namespace drk {

namespace {

using json = nlohmann::ordered_json;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON has no infinities; they go out as strings
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double parse_extended(const std::string& s, const char* what) {
    if (s == "inf" || s == "infinity" || s == "Inf") return INFINITY;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string(what) + ": not a number: '" + s + "'");
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) v.push_back(parse_extended(item, what));
    }
    if (v.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return v;
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("grid needs at least one point");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

json space_json(const SpaceParams& p) { return json{{"m", p.m}, {"k", p.k}, {"Q", p.Q}, {"n", p.n}}; }

// Options every subcommand takes; unset ones leave the config value alone.
struct Common {
    std::string config;
    std::optional<int> m, k, threads;
    std::optional<std::string> instance, csv, json_out, out_dir;
    std::optional<double> quad_tol, ode_tol;
};

void add_common(CLI::App* sc, Common& c) {
    sc->add_option("--config", c.config, "INI file; flags given here override it");
    sc->add_option("--m", c.m, "dimension of v (positive, even)");
    sc->add_option("--k", c.k, "dimension of z (>= 0)");
    sc->add_option("--instance", c.instance, "named group: heisenberg:d, quaternionic:d, abelian:m");
    sc->add_option("--threads", c.threads, "thread budget (0: DRK_THREADS or hardware)");
    sc->add_option("--quad-tol", c.quad_tol, "quadrature tolerance");
    sc->add_option("--ode-tol", c.ode_tol, "ODE local tolerance");
    sc->add_option("--csv", c.csv, "CSV output file (default: stdout)");
    sc->add_option("--json", c.json_out, "JSON output file (default: stdout)");
    sc->add_option("--output-dir", c.out_dir, "directory for relative output paths");
}

RunConfig resolve(const Common& c) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (c.instance) cfg.instance = *c.instance;
    if (!cfg.instance.empty()) {
        const auto p = instance_by_name(cfg.instance).params;
        if ((c.m && *c.m != p.m) || (c.k && *c.k != p.k))
            throw std::invalid_argument("--m/--k disagree with instance " + cfg.instance);
        cfg.m = p.m;
        cfg.k = p.k;
    }
    if (c.m) cfg.m = *c.m;
    if (c.k) cfg.k = *c.k;
    if (c.threads) cfg.threads = *c.threads;
    if (c.quad_tol) cfg.quad_tol = *c.quad_tol;
    if (c.ode_tol) cfg.ode_tol = *c.ode_tol;
    if (c.csv) cfg.csv = *c.csv;
    if (c.json_out) cfg.json = *c.json_out;
    if (c.out_dir) cfg.output_dir = *c.out_dir;
    cfg.validate();
    if (cfg.threads > 0) set_thread_budget(cfg.threads);
    return cfg;
}

// Writes to output_dir/name, or to the fallback stream when name is empty.
class Sink {
public:
    Sink(const RunConfig& cfg, const std::string& name, std::ostream& fallback) : os_(&fallback) {
        if (name.empty()) return;
        const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / name;
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        file_.open(path);
        if (!file_) throw std::invalid_argument("cannot write " + path.string());
        os_ = &file_;
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

void write_csv_row(std::ostream& os, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) os << ',';
        os << c;
        first = false;
    }
    os << '\n';
}

json report_json(const BoundReport& r, const SpaceParams& p) {
    json regimes = json::array();
    for (const auto& g : r.regimes)
        regimes.push_back({{"regime", g.regime == Regime::small ? "small" : "large"},
                           {"ratio", num(g.ratio)},
                           {"points", g.points}});
    json j{{"schema_version", kSchemaVersion},
           {"kind", r.kind},
           {"space", space_json(p)},
           {"grid", r.grid},
           {r.kind == "upper" ? "sup_ratio" : "inf_ratio", num(r.ratio)},
           {"refined_ratio", num(r.refined_ratio)},
           {"refinement_drift", num(r.refinement_drift)},
           {"stable", r.stable},
           {"valid", r.stable && std::isfinite(r.ratio) && r.ratio > 0},
           {"points", r.points},
           {"excluded", r.excluded},
           {"regimes", regimes}};
    if (r.kind == "lower") {
        json scan = json::array();
        for (const auto& [c, v] : r.c_scan) scan.push_back({{"c", c}, {"inf_ratio", num(v)}});
        j["c_scan"] = scan;
        j["smallest_c"] = r.smallest_c;
    }
    return j;
}

const char* kKernelColumns = "CSV columns: r, tau_re, tau_im, re, im, abs, method, quad_err";

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Complex-time heat and Schrodinger kernels on Damek-Ricci spaces", "drk"};
    app.require_subcommand(1);
    app.footer("Numbers are printed with 17 significant digits. Exit codes: 0 ok, 1 numeric failure or failed "
               "check, 2 usage error. DRK_THREADS sets the default thread budget.");
    Common c;
    std::function<int()> action;

    // kernel
    auto* k1 = app.add_subcommand("kernel", "h_tau(r) at one point");
    add_common(k1, c);
    double tau_re = 1.0, tau_im = 0.0, r_pt = 1.0;
    k1->add_option("--tau-re", tau_re, "Re tau (>= 0)");
    k1->add_option("--tau-im", tau_im, "Im tau");
    k1->add_option("--r", r_pt, "distance (>= 1e-3)")->required();
    k1->footer(kKernelColumns);

    // kernel-grid
    auto* kg = app.add_subcommand("kernel-grid", "h_tau on an r x tau grid");
    add_common(kg, c);
    std::optional<double> r_min, r_max;
    std::optional<int> r_steps;
    std::string tau_file, tau_inline;
    kg->add_option("--r-min", r_min, "first radius");
    kg->add_option("--r-max", r_max, "last radius");
    kg->add_option("--r-steps", r_steps, "number of radii, uniform");
    kg->add_option("--tau-list", tau_file, "file of re:im entries (comma or newline separated, # comments)");
    kg->add_option("--taus", tau_inline, "inline list, e.g. 1:0,0:0.5");
    kg->footer(std::string(kKernelColumns) + "; rows ordered by tau, then r.");

    // phi
    auto* ph = app.add_subcommand("phi", "spherical function phi_s by ODE integration");
    add_common(ph, c);
    double s_pt = 1.0, phi_rmax = 20.0;
    int phi_steps = 201;
    ph->add_option("--s", s_pt, "spectral parameter (>= 0)")->required();
    ph->add_option("--r-max", phi_rmax, "last radius");
    ph->add_option("--r-steps", phi_steps, "number of radii from 0");
    ph->footer("CSV columns: r, phi");

    // plancherel
    auto* pl = app.add_subcommand("plancherel", "Plancherel density |c(s)|^-2 by asymptotic fit");
    add_common(pl, c);
    double s_lo = 0.1, s_hi = 8.0;
    int s_steps = 33;
    pl->add_option("--s-min", s_lo, "first s (> 0)");
    pl->add_option("--s-max", s_hi, "last s");
    pl->add_option("--steps", s_steps, "number of s values");
    pl->footer("CSV columns: s, density, residual");

    // verify
    auto* vf = app.add_subcommand("verify", "bound-ratio sweeps");
    add_common(vf, c);
    std::string vkind;
    vf->add_option("kind", vkind, "upper or lower")->required()->check(CLI::IsMember({"upper", "lower"}));
    UpperGrid ug;
    LowerGrid lg;
    std::string t_list;
    vf->add_option("--mod-min", ug.mod_min, "upper: smallest |tau|");
    vf->add_option("--mod-max", ug.mod_max, "upper: largest |tau|");
    vf->add_option("--mod-steps", ug.mod_steps, "upper: |tau| values, log-uniform");
    vf->add_option("--r-min", r_min, "upper: smallest r");
    vf->add_option("--r-max", r_max, "largest r");
    vf->add_option("--r-steps", r_steps, "number of radii");
    vf->add_option("--t-list", t_list, "lower: times, comma separated");
    vf->add_option("--c", lg.c, "lower: region r > 1 + c t");
    vf->footer("JSON BoundReport: kind, space, grid, sup_ratio|inf_ratio, refined_ratio, refinement_drift, stable, "
               "valid, points, excluded, regimes[], and for lower c_scan[], smallest_c. Exit 1 unless valid.");

    // decay
    auto* dc = app.add_subcommand("decay", "log-log slope of ||s_t|| against t");
    add_common(dc, c);
    std::string q_str = "4", regime = "small", norm_name = "lq";
    std::optional<double> t_lo, t_hi, expect;
    int per_decade = 8;
    double slope_tol = 0.15;
    dc->add_option("--q", q_str, "norm index (> 2, or inf)");
    dc->add_option("--regime", regime, "small ([grids] t_min..t_max) or large ([2, 200])")
        ->check(CLI::IsMember({"small", "large"}));
    dc->add_option("--norm", norm_name, "lq, weak (L^{q,inf}) or aq")->check(CLI::IsMember({"lq", "weak", "aq"}));
    dc->add_option("--t-min", t_lo, "override the window start");
    dc->add_option("--t-max", t_hi, "override the window end");
    dc->add_option("--per-decade", per_decade, "samples per decade (>= 8)");
    dc->add_option("--expect", expect, "exit 1 unless the slope is within --slope-tol of this");
    dc->add_option("--slope-tol", slope_tol, "tolerance for --expect");
    dc->footer("CSV columns: t, norm; trailing # lines carry slope, slope_stderr, residual, flagged.");

    // weighted-growth
    auto* wg = app.add_subcommand("weighted-growth", "|sigma_t(0,0,a)| along a -> 0");
    add_common(wg, c);
    double wg_t = 1.0, wg_c = 4.0, L_lo = 10.0, L_hi = 400.0;
    int L_n = 24;
    wg->add_option("--t", wg_t, "time");
    wg->add_option("--c", wg_c, "region log(1/a) > 1 + c|t|");
    wg->add_option("--log-min", L_lo, "smallest log(1/a)");
    wg->add_option("--log-max", L_hi, "largest log(1/a)");
    wg->add_option("--points", L_n, "number of a values, log-uniform in log(1/a)");
    wg->footer("CSV columns: a, log_inv_a, log_abs_sigma; trailing # lines carry slope against log log(1/a), "
               "max_growth over a = 0.1, rejected.");

    // propagate
    auto* pg = app.add_subcommand("propagate", "radial Schrodinger evolution");
    add_common(pg, c);
    std::string data = "gaussian:1";
    double t_end = 1.0, r_out = 20.0;
    int t_steps = 10, r_out_steps = 81;
    bool distinguished = false;
    pg->add_option("--data", data, "gaussian:sigma or heat:tau");
    pg->add_option("--t-max", t_end, "final time (may be negative)");
    pg->add_option("--t-steps", t_steps, "time steps");
    pg->add_option("--r-out-max", r_out, "output grid end");
    pg->add_option("--r-out-steps", r_out_steps, "output radii");
    pg->add_flag("--distinguished", distinguished, "evolve under the distinguished Laplacian; output on x = (0,0,a)");
    pg->footer("CSV columns: t, r, re, im (with --distinguished: t, a, re, im, a = exp(-r)); trailing # lines "
               "carry l2_initial and max_l2_drift.");

    // strichartz
    auto* st = app.add_subcommand("strichartz", "window norm ||u||_{L^p_t L^q_x} over a time window");
    add_common(st, c);
    std::string p_str = "2", sq_str = "4", window;
    int st_steps = 40;
    bool unchecked = false;
    st->add_option("--p", p_str, "time exponent (>= 2, or inf)");
    st->add_option("--q", sq_str, "space exponent (>= 2, or inf)");
    st->add_option("--window", window, "t0:t1 (default 0:1)");
    st->add_option("--data", data, "gaussian:sigma or heat:tau");
    st->add_option("--t-steps", st_steps, "time steps on the window (even; half of it gives the drift)");
    st->add_flag("--unchecked", unchecked, "allow pairs outside the admissible triangle");
    st->footer("JSON: space, data, pair, admissible, window, t_steps, norm, l2_initial, ratio, coarse_ratio, drift.");

    // acceptance
    auto* ac = app.add_subcommand("acceptance", "run the acceptance suite, one line per criterion");
    add_common(ac, c);
    std::string only;
    ac->add_option("--only", only, "criteria to run, comma separated (default all)");
    ac->footer("Lines: PASS|FAIL id title: summary [seconds]. With --json, the metrics as JSON. Exit 1 on any "
               "failure. --m/--k add a space to the criteria that sweep all test spaces.");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        const RunConfig cfg = resolve(c);
        const SpaceParams p = space_params(cfg.m, cfg.k);

        if (k1->parsed()) {
            const auto v = kernel_h(p, ComplexTime(tau_re, tau_im), r_pt, cfg.quad_tol);
            Sink s(cfg, cfg.csv, out);
            write_csv_row(*s, {"r", "tau_re", "tau_im", "re", "im", "abs", "method", "quad_err"});
            write_csv_row(*s, {g17(r_pt), g17(tau_re), g17(tau_im), g17(v.value.real()), g17(v.value.imag()),
                               g17(std::abs(v.value)), method_name(v.method), g17(v.quad_error)});
            if (!v.converged) throw NumericFailure("odd-k integral did not reach tolerance");
        } else if (kg->parsed()) {
            std::vector<cplx> taus = cfg.taus;
            if (!tau_file.empty()) {
                std::ifstream f(tau_file);
                if (!f) throw std::invalid_argument("cannot open " + tau_file);
                std::string line, all;
                while (std::getline(f, line)) {
                    const auto hash = line.find('#');
                    if (hash != std::string::npos) line.resize(hash);
                    all += line + ",";
                }
                taus = parse_tau_list(all);
            } else if (!tau_inline.empty()) {
                taus = parse_tau_list(tau_inline);
            }
            if (taus.empty()) throw std::invalid_argument("no tau values");
            for (const auto& t : taus) ComplexTime check(t);
            const auto r = linspace(r_min.value_or(cfg.r_min), r_max.value_or(cfg.r_max), r_steps.value_or(cfg.r_steps));
            const auto g = kernel_grid(p, r, taus, cfg.quad_tol);
            Sink s(cfg, cfg.csv, out);
            write_csv_row(*s, {"r", "tau_re", "tau_im", "re", "im", "abs", "method", "quad_err"});
            long bad = 0;
            for (const auto& row : g.rows) {
                write_csv_row(*s, {g17(row.r), g17(row.tau.real()), g17(row.tau.imag()), g17(row.v.value.real()),
                                   g17(row.v.value.imag()), g17(std::abs(row.v.value)), method_name(row.v.method),
                                   g17(row.v.quad_error)});
                bad += !row.v.converged;
            }
            if (bad) throw NumericFailure(std::to_string(bad) + " grid points did not reach tolerance");
        } else if (ph->parsed()) {
            const auto sol = phi(p, s_pt, linspace(0.0, phi_rmax, phi_steps), cfg.ode_tol);
            Sink s(cfg, cfg.csv, out);
            write_csv_row(*s, {"r", "phi"});
            for (std::size_t i = 0; i < sol.r.size(); ++i) write_csv_row(*s, {g17(sol.r[i]), g17(sol.samples[i])});
        } else if (pl->parsed()) {
            const auto sv = linspace(s_lo, s_hi, s_steps);
            std::vector<CFunctionEstimate> est(sv.size());
            CFunctionOptions o;
            o.ode_tol = cfg.ode_tol;
            parallel_for(sv.size(), [&](std::size_t i) { est[i] = c_function(p, sv[i], o); });
            Sink s(cfg, cfg.csv, out);
            write_csv_row(*s, {"s", "density", "residual"});
            for (const auto& e : est) write_csv_row(*s, {g17(e.s), g17(e.plancherel_density), g17(e.residual)});
        } else if (vf->parsed()) {
            BoundReport rep;
            if (vkind == "upper") {
                ug.r_min = r_min.value_or(cfg.r_min);
                ug.r_max = r_max.value_or(cfg.r_max);
                ug.r_steps = r_steps.value_or(cfg.r_steps);
                rep = verify_upper_bound(p, ug, cfg.quad_tol);
            } else {
                if (!t_list.empty()) lg.t = parse_list(t_list, "--t-list");
                lg.r_max = r_max.value_or(cfg.r_max);
                lg.r_steps = r_steps.value_or(cfg.r_steps);
                rep = verify_lower_bound(p, lg, cfg.quad_tol);
            }
            const json j = report_json(rep, p);
            Sink s(cfg, cfg.json, out);
            *s << j.dump(2) << '\n';
            return j["valid"].get<bool>() ? 0 : 1;
        } else if (dc->parsed()) {
            DecayOptions o = regime == "small" ? small_time_defaults() : large_time_defaults();
            if (regime == "small") {
                o.t_min = cfg.t_min;
                o.t_max = cfg.t_max;
            }
            if (t_lo) o.t_min = *t_lo;
            if (t_hi) o.t_max = *t_hi;
            o.per_decade = per_decade;
            o.norm = norm_name == "lq" ? DecayNorm::lq : norm_name == "weak" ? DecayNorm::lq_weak : DecayNorm::aq;
            o.tol = std::max(cfg.quad_tol, 1e-12);
            o.residual_threshold = cfg.fit_tol;
            const auto f = decay_fit(p, parse_extended(q_str, "--q"), o);
            Sink s(cfg, cfg.csv, out);
            write_csv_row(*s, {"t", "norm"});
            for (std::size_t i = 0; i < f.times.size(); ++i) write_csv_row(*s, {g17(f.times[i]), g17(f.norms[i])});
            *s << "# slope=" << g17(f.slope) << "\n# slope_stderr=" << g17(f.slope_stderr)
               << "\n# residual=" << g17(f.residual) << "\n# flagged=" << (f.flagged ? "true" : "false") << '\n';
            if (expect && !(std::abs(f.slope - *expect) <= slope_tol)) return 1;
        } else if (wg->parsed()) {
            const auto g = weighted_growth_check(p, wg_t, default_growth_list(L_lo, L_hi, L_n), wg_c, cfg.quad_tol);
            Sink s(cfg, cfg.csv, out);
            write_csv_row(*s, {"a", "log_inv_a", "log_abs_sigma"});
            for (const auto& pt : g.points) write_csv_row(*s, {g17(pt.a), g17(pt.log_inv_a), g17(pt.log_abs_sigma)});
            *s << "# slope=" << g17(g.fit.slope) << "\n# expected=" << g17(0.5 * (p.n - 1))
               << "\n# max_growth=" << g17(g.max_growth) << "\n# rejected=" << g.rejected << '\n';
        } else if (pg->parsed()) {
            if (t_steps < 1) throw std::invalid_argument("--t-steps must be >= 1");
            std::vector<double> t;
            for (int i = 0; i <= t_steps; ++i) t.push_back(t_end * i / t_steps);
            EvolutionOptions eo;
            eo.calculus.tol = cfg.quad_tol;
            eo.calculus.ode_tol = cfg.ode_tol;
            eo.calculus.s_max = cfg.s_max;
            eo.r_out_max = r_out;
            eo.r_out_steps = r_out_steps;
            const auto f = data_by_name(p, data);
            Sink s(cfg, cfg.csv, out);
            if (distinguished) {
                const auto rec = evolve_distinguished(p, f, t, eo, data);
                write_csv_row(*s, {"t", "a", "re", "im"});
                std::vector<double> a;
                for (double r : rec.core.r) a.push_back(std::exp(-r));
                for (std::size_t i = 0; i < t.size(); ++i) {
                    const auto u = rec.on_slice(i, a);
                    for (std::size_t j = 0; j < a.size(); ++j)
                        write_csv_row(*s, {g17(t[i]), g17(a[j]), g17(u[j].real()), g17(u[j].imag())});
                }
                *s << "# l2_initial=" << g17(rec.core.l2_initial) << "\n# max_l2_drift=" << g17(rec.core.max_l2_drift)
                   << '\n';
            } else {
                const auto rec = evolve_schrodinger(p, f, t, eo, data);
                write_csv_row(*s, {"t", "r", "re", "im"});
                for (std::size_t i = 0; i < t.size(); ++i)
                    for (std::size_t j = 0; j < rec.r.size(); ++j)
                        write_csv_row(*s, {g17(t[i]), g17(rec.r[j]), g17(rec.u[i][j].real()), g17(rec.u[i][j].imag())});
                *s << "# l2_initial=" << g17(rec.l2_initial) << "\n# max_l2_drift=" << g17(rec.max_l2_drift) << '\n';
            }
        } else if (st->parsed()) {
            const AdmissiblePair pair{parse_extended(p_str, "--p"), parse_extended(sq_str, "--q")};
            const bool adm = is_admissible(p, pair);
            if (!adm && !unchecked) throw std::invalid_argument("pair is outside the admissible triangle (--unchecked)");
            TimeWindow w{0.0, 1.0};
            if (!window.empty()) {
                const auto colon = window.find(':');
                if (colon == std::string::npos) throw std::invalid_argument("--window: expected t0:t1");
                w = {parse_extended(window.substr(0, colon), "--window"),
                     parse_extended(window.substr(colon + 1), "--window")};
            }
            if (!(w.t1 > w.t0) || w.t0 < 0) throw std::invalid_argument("--window: need 0 <= t0 < t1");
            if (st_steps < 2 || st_steps % 2) throw std::invalid_argument("--t-steps must be even and >= 2");
            auto grid = [&](int n) {
                std::vector<double> t;
                for (int i = 0; i <= n; ++i) t.push_back(w.t1 * i / n);
                return t;
            };
            EvolutionOptions eo;
            eo.calculus.tol = cfg.quad_tol;
            eo.calculus.ode_tol = cfg.ode_tol;
            eo.calculus.s_max = cfg.s_max;
            const auto f = data_by_name(p, data);
            const auto fine = evolve_schrodinger(p, f, grid(st_steps), eo, data);
            const auto coarse = evolve_schrodinger(p, f, grid(st_steps / 2), eo, data);
            const double nf = strichartz_window_norm(fine, pair, w, false);
            const double nc = strichartz_window_norm(coarse, pair, w, false);
            const json j{{"schema_version", kSchemaVersion},
                         {"space", space_json(p)},
                         {"data", data},
                         {"pair", {{"p", num(pair.p)}, {"q", num(pair.q)}}},
                         {"admissible", adm},
                         {"window", {w.t0, w.t1}},
                         {"t_steps", st_steps},
                         {"norm", num(nf)},
                         {"l2_initial", fine.l2_initial},
                         {"ratio", num(nf / fine.l2_initial)},
                         {"coarse_ratio", num(nc / coarse.l2_initial)},
                         {"drift", num(std::abs(nf / fine.l2_initial - nc / coarse.l2_initial) / (nf / fine.l2_initial))}};
            Sink s(cfg, cfg.json, out);
            *s << j.dump(2) << '\n';
        } else if (ac->parsed()) {
            AcceptanceOptions o;
            if (!only.empty())
                for (double v : parse_list(only, "--only")) o.only.push_back(int(v));
            if (c.m || c.k || !cfg.instance.empty()) o.extra_space = p;
            int failed = 0;
            json results = json::array();
            run_acceptance(o, [&](const CriterionResult& r) {
                out << format_result(r) << std::endl;
                failed += !r.pass;
                json m = json::object();
                for (const auto& [name, v] : r.metrics) m[name] = num(v);
                results.push_back({{"id", r.id},
                                   {"title", r.title},
                                   {"pass", r.pass},
                                   {"summary", r.summary},
                                   {"seconds", r.seconds},
                                   {"metrics", m}});
            });
            out << failed << " failed" << std::endl;
            if (!cfg.json.empty()) {
                Sink s(cfg, cfg.json, out);
                *s << json{{"schema_version", kSchemaVersion}, {"failed", failed}, {"criteria", results}}.dump(2)
                   << '\n';
            }
            return failed ? 1 : 0;
        }
        return 0;
    } catch (const NumericFailure& e) {
        out << json{{"schema_version", kSchemaVersion}, {"error", "numeric_failure"}, {"message", e.what()}}.dump()
            << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        out << json{{"schema_version", kSchemaVersion}, {"error", "failure"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace drk
