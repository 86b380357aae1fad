// One line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "drk/acceptance.hpp"

int main(int argc, char** argv) {
    drk::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
    int failed = 0;
    drk::run_acceptance(opt, [&](const drk::CriterionResult& r) {
        std::printf("%s\n", drk::format_result(r).c_str());
        std::fflush(stdout);
        failed += !r.pass;
    });
    std::printf("%d failed\n", failed);
    return failed ? 1 : 0;
}
