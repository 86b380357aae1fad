#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drk/geometry.hpp"

namespace drk {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string summary;  // one line, numbers against tolerances
    std::vector<std::pair<std::string, double>> metrics;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> only;  // empty: all criteria
    // added to the criteria that sweep all test spaces
    std::optional<SpaceParams> extra_space;
};

int acceptance_count();
CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});
// Runs the selected criteria in order; report is called after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {},
                                            const std::function<void(const CriterionResult&)>& report = {});
// "PASS  3  heat equation residual: ..." style line
std::string format_result(const CriterionResult& r);

}  // namespace drk
