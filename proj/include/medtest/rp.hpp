#pragma once

// Rejection probabilities of boundary tests by one-dimensional quadrature
// over |t|_(2), with the |t|_(1) integral in closed form.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "medtest/boundary.hpp"
#include "medtest/dist.hpp"

namespace medtest {

inline constexpr double kDefaultRPTolerance = 1e-8;
/// Outer integration runs over [0, max(mu) + margin].
inline constexpr double kTruncationMargin = 9.0;

struct RPValue {
    double value = 0.0;
    double error = 0.0;  // quadrature error estimate
};

struct RPGrid {
    std::vector<Noncentrality> mu;
    std::vector<double> values;
    std::vector<double> errors;
    std::string boundary_id;

    /// "mu1,mu2[,mu3],value,error" lines with a header, 17 significant digits.
    std::string to_delimited() const;
};

/// Probability that |t|_(1) > frontier(|t|_(2)) under mu (K = 2). The frontier
/// is clamped to [0, t]; `breakpoints` should list its kinks and jumps.
RPValue rejection_prob_frontier(const std::function<double(double)>& frontier,
                                std::span<const double> breakpoints, const Noncentrality& mu,
                                double tol = kDefaultRPTolerance,
                                double truncation_margin = kTruncationMargin);

RPValue rejection_prob(const Boundary& boundary, const Noncentrality& mu,
                       double tol = kDefaultRPTolerance);

struct KnotGradient {
    std::vector<double> ordinate;  // d RP / d g_k
    std::vector<double> abscissa;  // d RP / d t_k
};

/// Derivatives of the rejection probability with respect to each knot of
/// `boundary`, tail held fixed.
KnotGradient rejection_prob_knot_gradient(const GBoundary& boundary, const Noncentrality& mu,
                                          double tol = kDefaultRPTolerance);

/// Rejection probability of the Wald rule W > chi2_critical_value.
RPValue wald_rejection_prob(double chi2_critical_value, const Noncentrality& mu,
                            double tol = kDefaultRPTolerance);

/// NRP along the null ray mu = (0, mu0).
RPGrid nrp_curve(const Boundary& boundary, std::span<const double> mu0_grid,
                 double tol = kDefaultRPTolerance, std::string boundary_id = {},
                 std::size_t threads = 0);

/// Rejection probabilities at arbitrary two-dimensional mu points.
RPGrid rp_grid(const Boundary& boundary, std::span<const Noncentrality> points,
               double tol = kDefaultRPTolerance, std::string boundary_id = {},
               std::size_t threads = 0);

enum class Rule3D {
    weighted,  // (1 - w(t3)) g_LR(t2) + w(t3) g(t2)
    naive,     // g(t2), ignoring t3
};

/// Three-dimensional rejection probability (K = 3) by nested adaptive
/// quadrature over t2 <= t3, the t1 integral in closed form.
RPValue rejection_prob_3d(const Noncentrality& mu, double tol = kDefaultRPTolerance,
                          Rule3D rule = Rule3D::weighted,
                          const GBoundary& boundary = published_optimal_boundary());

}  // namespace medtest
