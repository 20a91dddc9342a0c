#include "medtest/error.hpp"

namespace medtest {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_probability: return "invalid-probability";
        case ErrorCode::domain_error: return "domain-error";
        case ErrorCode::unsupported_dimension: return "unsupported-dimension";
        case ErrorCode::no_similar_test_exists: return "no-similar-test-exists";
        case ErrorCode::singular_design: return "singular-design";
        case ErrorCode::undefined_statistic: return "undefined-statistic";
        case ErrorCode::accuracy_failure: return "accuracy-failure";
        case ErrorCode::optimization_failure: return "optimization-failure";
        case ErrorCode::infeasible_constraints: return "infeasible-constraints";
        case ErrorCode::malformed_file: return "malformed-file";
        case ErrorCode::invariant_violation: return "invariant-violation";
        case ErrorCode::usage: return "usage";
    }
    return "unknown";
}

}  // namespace medtest
