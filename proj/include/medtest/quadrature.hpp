#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace medtest {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;          // estimated absolute error
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-8;
    double rel_tol = 0.0;
    std::size_t max_intervals = 4000;
};

/// Single Gauss-Kronrod 15-point panel on [a, b]; error is |K15 - G7|.
QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

/// Globally adaptive bisection. The initial partition is [a, b] split at every
/// breakpoint strictly inside it (kinks and jumps of the integrand belong there).
/// Throws AccuracyFailure when the tolerance cannot be met.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints = {},
                           const QuadratureOptions& options = {});

}  // namespace medtest
