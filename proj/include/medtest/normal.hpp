#pragma once

// Standard normal distribution kernels.

namespace medtest {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrt2OverPi = 0.79788456080286535588;   // sqrt(2/pi)
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;    // 1/sqrt(2 pi)

double std_normal_pdf(double x) noexcept;

/// Phi(x). Backed by erfc, so the absolute error stays below 1e-15 and
/// the function saturates cleanly at 0 and 1 for extreme arguments.
double std_normal_cdf(double x) noexcept;

/// 1 - Phi(x) without cancellation.
double std_normal_sf(double x) noexcept;

/// Phi(hi) - Phi(lo), evaluated on whichever tail avoids cancellation.
double std_normal_interval(double lo, double hi) noexcept;

/// Inverse of Phi. Throws Error(invalid_probability) unless 0 < p < 1.
double std_normal_quantile(double p);

/// Two-sided critical value Phi^{-1}(1 - alpha/2).
double two_sided_critical_value(double alpha);

}  // namespace medtest
