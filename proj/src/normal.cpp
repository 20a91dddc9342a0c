#include "medtest/normal.hpp"

#include <cmath>
#include <string>

#include "medtest/error.hpp"

namespace medtest {

double std_normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_sf(double x) noexcept { return 0.5 * std::erfc(x / kSqrt2); }

double std_normal_interval(double lo, double hi) noexcept {
    if (hi <= lo) return 0.0;
    if (lo >= 0.0) return std_normal_sf(lo) - std_normal_sf(hi);
    if (hi <= 0.0) return std_normal_cdf(hi) - std_normal_cdf(lo);
    return 1.0 - std_normal_sf(hi) - std_normal_cdf(lo);
}

namespace {

// Acklam's rational approximation, relative error about 1.15e-9.
double acklam_quantile(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    constexpr double p_high = 1.0 - p_low;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > p_high) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorCode::invalid_probability,
                    "probability must lie strictly inside (0, 1), got " + std::to_string(p));
    }
    double x = acklam_quantile(p);
    // Halley steps; the residual is taken on the smaller tail to keep precision.
    for (int iter = 0; iter < 3; ++iter) {
        const double e = (p < 0.5) ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_sf(x);
        const double u = e / std_normal_pdf(x);
        const double step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
    }
    return x;
}

double two_sided_critical_value(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::invalid_probability,
                    "alpha must lie strictly inside (0, 1), got " + std::to_string(alpha));
    }
    // Phi^{-1}(1 - a/2) = -Phi^{-1}(a/2); the lower tail is the accurate one.
    return -std_normal_quantile(0.5 * alpha);
}

}  // namespace medtest
