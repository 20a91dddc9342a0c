#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace medtest {

enum class ErrorCode {
    invalid_probability,
    domain_error,
    unsupported_dimension,
    no_similar_test_exists,
    singular_design,
    undefined_statistic,
    accuracy_failure,
    optimization_failure,
    infeasible_constraints,
    malformed_file,
    invariant_violation,
    usage,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code is what callers branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when adaptive quadrature cannot meet its tolerance.
class AccuracyFailure : public Error {
public:
    AccuracyFailure(const std::string& message, double estimate, double achieved_error)
        : Error(ErrorCode::accuracy_failure, message),
          estimate_(estimate),
          achieved_error_(achieved_error) {}

    double estimate() const noexcept { return estimate_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double estimate_;
    double achieved_error_;
};

}  // namespace medtest
