#pragma once

#include <stdexcept>
#include <string>

namespace drk {

// A computation ran but could not meet its tolerance (step collapse, non-convergence,
// ill-conditioned fit). Distinct from std::invalid_argument / std::domain_error.
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace drk
