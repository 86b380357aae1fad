#include <filesystem>
#include <fstream>
#include <string>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "drk/cli.hpp"

using namespace drk;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = run_cli(args, o, e);
    return {code, o.str(), e.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST_CASE("cli: kernel row and dispatch") {
    auto r = run({"kernel", "--m", "2", "--k", "0", "--tau-re", "1", "--tau-im", "0", "--r", "1"});
    CHECK(r.code == 0);
    auto l = lines(r.out);
    REQUIRE(l.size() == 2);
    CHECK(l[0] == "r,tau_re,tau_im,re,im,abs,method,quad_err");
    CHECK(l[1].find(",even-closed-form,") != std::string::npos);
    CHECK(run({"kernel", "--m", "2", "--k", "1", "--r", "2"}).out.find("odd-quadrature") != std::string::npos);
    // full precision
    CHECK(l[1].rfind("1,1,0,0.16417259794154", 0) == 0);
}

TEST_CASE("cli: usage errors exit 2") {
    CHECK(run({"kernel", "--r", "1", "--bogus"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"kernel"}).code == 2);  // --r required
    CHECK(run({"kernel", "--m", "3", "--r", "1"}).code == 2);  // odd m
    CHECK(run({"kernel", "--r", "1e-5"}).code == 2);  // below r_min
    CHECK(run({"kernel", "--tau-re", "-1", "--r", "1"}).code == 2);
    CHECK(run({"verify", "sideways"}).code == 2);
    CHECK(run({"strichartz", "--p", "4", "--q", "4", "--m", "2", "--k", "1"}).code == 2);  // inadmissible for n = 4
    auto h = run({"kernel", "--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("CSV columns: r, tau_re") != std::string::npos);
}

TEST_CASE("cli: numeric failure gives a JSON diagnostic") {
    auto r = run({"propagate", "--m", "2", "--k", "1", "--data", "gaussian:1000"});
    CHECK(r.code == 1);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["error"] == "numeric_failure");
}

TEST_CASE("cli: config file with flag overrides") {
    const auto dir = std::filesystem::temp_directory_path() / "drk_cli_test";
    std::filesystem::create_directories(dir);
    const auto ini = dir / "run.ini";
    std::ofstream(ini) << "[space]\nm = 2\nk = 0\n[grids]\nr_min = 0.5\nr_max = 2\nr_steps = 4\ntaus = 1:0, 0.5:0.5\n";
    auto a = run({"kernel-grid", "--config", ini.string()});
    CHECK(a.code == 0);
    auto l = lines(a.out);
    CHECK(l.size() == 1 + 4 * 2);
    CHECK(l[1].find("even-closed-form") != std::string::npos);
    auto b = run({"kernel-grid", "--config", ini.string(), "--k", "1", "--r-steps", "3", "--output-dir", dir.string(),
                  "--csv", "grid.csv"});
    CHECK(b.code == 0);
    CHECK(b.out.empty());
    std::ifstream f(dir / "grid.csv");
    std::stringstream ss;
    ss << f.rdbuf();
    l = lines(ss.str());
    CHECK(l.size() == 1 + 3 * 2);
    CHECK(l[1].find("odd-quadrature") != std::string::npos);
    CHECK(run({"kernel", "--config", (dir / "missing.ini").string(), "--r", "1"}).code == 2);
    CHECK(run({"kernel", "--instance", "heisenberg:1", "--k", "0", "--r", "1"}).code == 2);
    CHECK(run({"kernel", "--instance", "quaternionic:1", "--r", "1"}).out.find("odd-quadrature") != std::string::npos);
}

TEST_CASE("cli: output does not depend on the thread count") {
    const std::vector<std::string> base{"kernel-grid", "--m", "2", "--k", "1", "--r-min", "0.5", "--r-max", "6",
                                        "--r-steps", "12", "--taus", "1:0,0:0.7"};
    auto one = base, two = base;
    one.insert(one.end(), {"--threads", "1"});
    two.insert(two.end(), {"--threads", "3"});
    const auto a = run(one), b = run(two);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli: reports") {
    auto v = run({"verify", "lower", "--m", "2", "--k", "0"});
    CHECK(v.code == 0);
    auto j = nlohmann::json::parse(v.out);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["kind"] == "lower");
    CHECK(j["valid"] == true);
    CHECK(j["inf_ratio"].get<double>() > 0);

    auto d = run({"decay", "--m", "2", "--k", "0", "--q", "inf", "--expect", "-1.5", "--slope-tol", "1e-4"});
    CHECK(d.code == 0);
    CHECK(d.out.find("# slope=-1.5") != std::string::npos);
    CHECK(run({"decay", "--m", "2", "--k", "0", "--q", "inf", "--expect", "-2"}).code == 1);

    auto p = run({"phi", "--m", "2", "--k", "0", "--s", "1", "--r-max", "2", "--r-steps", "3"});
    auto l = lines(p.out);
    REQUIRE(l.size() == 4);
    CHECK(l[0] == "r,phi");
    CHECK(l[1] == "0,1");

    auto pl = run({"plancherel", "--m", "2", "--k", "0", "--s-min", "1", "--s-max", "2", "--steps", "2"});
    l = lines(pl.out);
    REQUIRE(l.size() == 3);
    CHECK(std::stod(l[1].substr(2)) == doctest::Approx(4.0).epsilon(1e-12));

    auto a = run({"acceptance", "--only", "10"});
    CHECK(a.code == 0);
    CHECK(a.out.rfind("PASS 10", 0) == 0);
}
