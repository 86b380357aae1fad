#include "drk/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace drk {

namespace pt = boost::property_tree;

namespace {

std::string full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " is not a number: '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& key) {
    const double v = to_double(s, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument("config: " + key + " must be an integer");
    return int(v);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::complex<double>> parse_tau_list(const std::string& s) {
    std::vector<std::complex<double>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            out.emplace_back(to_double(item, "taus"), 0.0);
        } else {
            out.emplace_back(to_double(trim(item.substr(0, colon)), "taus"),
                             to_double(trim(item.substr(colon + 1)), "taus"));
        }
    }
    return out;
}

std::string format_tau_list(const std::vector<std::complex<double>>& taus) {
    std::string s;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (i) s += ", ";
        s += full(taus[i].real()) + ":" + full(taus[i].imag());
    }
    return s;
}

void RunConfig::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    need(m > 0 && m % 2 == 0, "m must be positive and even");
    need(k >= 0, "k must be nonnegative");
    need(r_min > 0 && r_max > r_min, "need 0 < r_min < r_max");
    need(r_steps >= 1, "r grid is empty");
    need(!taus.empty(), "tau list is empty");
    for (const auto& t : taus) need(t != 0.0 && t.real() >= 0, "tau must be nonzero with Re tau >= 0");
    need(t_min > 0 && t_max >= t_min, "need 0 < t_min <= t_max");
    need(t_steps >= 1, "t grid is empty");
    need(s_max >= 0, "s_max must be >= 0");
    need(quad_tol > 0 && ode_tol > 0 && fit_tol > 0, "tolerances must be positive");
    need(threads >= 0, "threads must be >= 0");
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    RunConfig c;
    static const char* known[] = {"space", "grids", "tolerances", "output", "run"};
    for (const auto& [section, body] : tree) {
        bool ok = false;
        for (const char* k : known) ok = ok || section == k;
        if (!ok) throw std::invalid_argument("config: unknown section [" + section + "]");
        for (const auto& [key, val] : body) {
            const std::string v = trim(val.data()), name = section + "." + key;
            if (name == "space.m") c.m = to_int(v, name);
            else if (name == "space.k") c.k = to_int(v, name);
            else if (name == "space.instance") c.instance = v;
            else if (name == "grids.r_min") c.r_min = to_double(v, name);
            else if (name == "grids.r_max") c.r_max = to_double(v, name);
            else if (name == "grids.r_steps") c.r_steps = to_int(v, name);
            else if (name == "grids.taus") c.taus = parse_tau_list(v);
            else if (name == "grids.t_min") c.t_min = to_double(v, name);
            else if (name == "grids.t_max") c.t_max = to_double(v, name);
            else if (name == "grids.t_steps") c.t_steps = to_int(v, name);
            else if (name == "grids.s_max") c.s_max = to_double(v, name);
            else if (name == "tolerances.quad") c.quad_tol = to_double(v, name);
            else if (name == "tolerances.ode") c.ode_tol = to_double(v, name);
            else if (name == "tolerances.fit") c.fit_tol = to_double(v, name);
            else if (name == "output.dir") c.output_dir = v;
            else if (name == "output.csv") c.csv = v;
            else if (name == "output.json") c.json = v;
            else if (name == "run.threads") c.threads = to_int(v, name);
            else throw std::invalid_argument("config: unknown key " + name);
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string to_ini(const RunConfig& c) {
    std::ostringstream os;
    os << "[space]\nm = " << c.m << "\nk = " << c.k << "\n";
    if (!c.instance.empty()) os << "instance = " << c.instance << "\n";
    os << "\n[grids]\nr_min = " << full(c.r_min) << "\nr_max = " << full(c.r_max) << "\nr_steps = " << c.r_steps
       << "\ntaus = " << format_tau_list(c.taus) << "\nt_min = " << full(c.t_min) << "\nt_max = " << full(c.t_max)
       << "\nt_steps = " << c.t_steps << "\ns_max = " << full(c.s_max) << "\n";
    os << "\n[tolerances]\nquad = " << full(c.quad_tol) << "\node = " << full(c.ode_tol) << "\nfit = " << full(c.fit_tol)
       << "\n";
    os << "\n[output]\ndir = " << c.output_dir << "\n";
    if (!c.csv.empty()) os << "csv = " << c.csv << "\n";
    if (!c.json.empty()) os << "json = " << c.json << "\n";
    os << "\n[run]\nthreads = " << c.threads << "\n";
    return os.str();
}

}  // namespace drk
