#pragma once

// Mediation decision procedures and the OLS front-end producing t-ratios.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "medtest/boundary.hpp"

namespace medtest {

/// y = tau x + theta2 m + u, m = theta1 x + v, optional exogenous controls.
struct MediationData {
    Eigen::VectorXd y;
    Eigen::VectorXd m;
    Eigen::VectorXd x;
    Eigen::MatrixXd controls;  // n x p, may have zero columns
};

enum class VarianceConvention {
    ols,  // residual sum of squares over n - k
    ml,   // residual sum of squares over n
};

struct MediationEstimates {
    double tau = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double tau_star = 0.0;
    double t1 = 0.0;  // t-ratio of theta1
    double t2 = 0.0;  // t-ratio of theta2
    double sigma11 = 0.0;  // residual variance of the y equation
    double sigma22 = 0.0;  // residual variance of the m equation
    double se_theta1 = 0.0;
    double se_theta2 = 0.0;
    std::size_t n = 0;
};

/// Demeans, partials out the controls, then runs both regressions.
/// Throws singular_design on rank deficiency, domain_error on bad shapes.
MediationEstimates ols_mediation(const MediationData& data,
                                 VarianceConvention convention = VarianceConvention::ols);

enum class Decision { accept, reject };

struct TestReport {
    std::string test;
    std::vector<double> t_values;
    std::optional<double> statistic;
    double threshold = 0.0;  // boundary value or critical value compared against
    Decision decision = Decision::accept;
    double alpha = 0.05;
    std::vector<std::pair<std::string, double>> extras;

    bool rejected() const noexcept { return decision == Decision::reject; }
    std::string to_json() const;
};

// Lightweight predicates shared by the reports and the Monte Carlo engine.
bool g_rejects(double t1, double t2, const Boundary& boundary) noexcept;
bool lr_rejects(double t1, double t2, double critical_value) noexcept;
bool wald_rejects(double t1, double t2, double chi2_critical_value) noexcept;

/// Weight on the two-dimensional boundary as a function of the largest |t|:
/// linear spline through (0,0), (1.35,0.959), (2.025,0.842), (2.7,1), then 1.
double weight_3d(double t_largest) noexcept;

/// Three-dimensional boundary (1 - w(t3)) min(t2, z) + w(t3) g(t2) for
/// ordered |t|_(2) <= |t|_(3).
double g_boundary_3d(double t_mid, double t_largest, const GBoundary& boundary) noexcept;
bool g3_rejects(double t1, double t2, double t3, const GBoundary& boundary) noexcept;

TestReport g_test(double t1, double t2, const Boundary& boundary = published_optimal_boundary());
TestReport g_test_3d(double t1, double t2, double t3,
                     const GBoundary& boundary = published_optimal_boundary());
TestReport lr_test(double t1, double t2, double alpha = 0.05);
/// Wald statistic W = t1^2 t2^2 / (t1^2 + t2^2) against chi2_1(1 - alpha);
/// the Sobel statistic sqrt(W) is reported as an extra.
TestReport sobel_wald_test(double t1, double t2, double alpha = 0.05);

}  // namespace medtest
