#include "medtest/mediation.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "medtest/error.hpp"
#include "medtest/normal.hpp"

namespace medtest {

namespace {

struct Ordered2 {
    double lo, hi;
};

Ordered2 order_abs(double a, double b) noexcept {
    const double x = std::abs(a), y = std::abs(b);
    return x <= y ? Ordered2{x, y} : Ordered2{y, x};
}

// Residualize the columns of `target` on [1, controls].
Eigen::MatrixXd partial_out(const Eigen::MatrixXd& target, const Eigen::MatrixXd& controls) {
    const Eigen::Index n = target.rows();
    Eigen::MatrixXd design(n, controls.cols() + 1);
    design.col(0).setOnes();
    if (controls.cols() > 0) design.rightCols(controls.cols()) = controls;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw Error(ErrorCode::singular_design, "controls are collinear with each other or the intercept");
    }
    return target - design * qr.solve(target);
}

}  // namespace

MediationEstimates ols_mediation(const MediationData& data, VarianceConvention convention) {
    const Eigen::Index n = data.y.size();
    const Eigen::Index p = data.controls.cols();
    if (data.m.size() != n || data.x.size() != n || (p > 0 && data.controls.rows() != n)) {
        throw Error(ErrorCode::domain_error, "y, m, x and controls must have the same length");
    }
    if (n <= p + 3) {
        throw Error(ErrorCode::domain_error, "need more observations than regressors plus three");
    }

    Eigen::MatrixXd raw(n, 3);
    raw.col(0) = data.y;
    raw.col(1) = data.m;
    raw.col(2) = data.x;
    const Eigen::MatrixXd z = partial_out(raw, data.controls);
    const Eigen::VectorXd y = z.col(0), m = z.col(1), x = z.col(2);

    const double xx = x.squaredNorm();
    const double scale = std::max({raw.col(2).squaredNorm(), 1.0});
    if (xx <= 1e-12 * scale) throw Error(ErrorCode::singular_design, "treatment has no variation after partialing out");

    MediationEstimates est;
    est.n = static_cast<std::size_t>(n);

    // m = theta1 x + v
    est.theta1 = x.dot(m) / xx;
    const Eigen::VectorXd v = m - est.theta1 * x;
    // Regressors absorbed by partialing out: intercept plus p controls.
    const double absorbed = static_cast<double>(p + 1);
    const double df_m = convention == VarianceConvention::ols ? static_cast<double>(n) - absorbed - 1.0
                                                              : static_cast<double>(n);
    est.sigma22 = v.squaredNorm() / df_m;
    est.se_theta1 = std::sqrt(est.sigma22 / xx);

    // y = tau x + theta2 m + u
    Eigen::MatrixXd xm(n, 2);
    xm.col(0) = x;
    xm.col(1) = m;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xm);
    if (qr.rank() < 2) throw Error(ErrorCode::singular_design, "treatment and mediator are collinear");
    const Eigen::Vector2d coef = qr.solve(y);
    est.tau = coef(0);
    est.theta2 = coef(1);
    const Eigen::VectorXd u = y - xm * coef;
    const double df_y = convention == VarianceConvention::ols ? static_cast<double>(n) - absorbed - 2.0
                                                              : static_cast<double>(n);
    est.sigma11 = u.squaredNorm() / df_y;
    const Eigen::Matrix2d xtx_inv = (xm.transpose() * xm).inverse();
    est.se_theta2 = std::sqrt(est.sigma11 * xtx_inv(1, 1));

    est.tau_star = x.dot(y) / xx;
    est.t1 = est.theta1 / est.se_theta1;
    est.t2 = est.theta2 / est.se_theta2;
    return est;
}

std::string TestReport::to_json() const {
    nlohmann::json j;
    j["test"] = test;
    j["t_values"] = t_values;
    j["statistic"] = statistic ? nlohmann::json(*statistic) : nlohmann::json(nullptr);
    j["threshold"] = threshold;
    j["decision"] = rejected() ? "reject" : "accept";
    j["alpha"] = alpha;
    for (const auto& [key, value] : extras) j[key] = value;
    return j.dump();
}

bool g_rejects(double t1, double t2, const Boundary& boundary) noexcept {
    const Ordered2 o = order_abs(t1, t2);
    return o.lo > eval(boundary, o.hi);
}

bool lr_rejects(double t1, double t2, double critical_value) noexcept {
    return std::min(std::abs(t1), std::abs(t2)) > critical_value;
}

bool wald_rejects(double t1, double t2, double chi2_critical_value) noexcept {
    const double a = t1 * t1, b = t2 * t2;
    if (a + b == 0.0) return false;
    return a * b / (a + b) > chi2_critical_value;
}

double weight_3d(double t) noexcept {
    static constexpr double kt[] = {0.0, 1.35, 2.025, 2.7};
    static constexpr double kw[] = {0.0, 0.959, 0.842, 1.0};
    t = std::abs(t);
    if (t >= kt[3]) return 1.0;
    std::size_t i = 0;
    while (t >= kt[i + 1]) ++i;
    return kw[i] + (t - kt[i]) / (kt[i + 1] - kt[i]) * (kw[i + 1] - kw[i]);
}

double g_boundary_3d(double t_mid, double t_largest, const GBoundary& boundary) noexcept {
    const double w = weight_3d(t_largest);
    const double z = boundary.tail();
    return (1.0 - w) * std::min(t_mid, z) + w * boundary.eval(t_mid);
}

bool g3_rejects(double t1, double t2, double t3, const GBoundary& boundary) noexcept {
    double s[3] = {std::abs(t1), std::abs(t2), std::abs(t3)};
    std::sort(s, s + 3);
    return s[0] > g_boundary_3d(s[1], s[2], boundary);
}

TestReport g_test(double t1, double t2, const Boundary& boundary) {
    const Ordered2 o = order_abs(t1, t2);
    TestReport r;
    r.test = "g-test";
    r.t_values = {t1, t2};
    r.statistic = o.lo;
    r.threshold = eval(boundary, o.hi);
    r.decision = o.lo > r.threshold ? Decision::reject : Decision::accept;
    r.alpha = level(boundary);
    return r;
}

TestReport g_test_3d(double t1, double t2, double t3, const GBoundary& boundary) {
    double s[3] = {std::abs(t1), std::abs(t2), std::abs(t3)};
    std::sort(s, s + 3);
    TestReport r;
    r.test = "g-test-3d";
    r.t_values = {t1, t2, t3};
    r.statistic = s[0];
    r.threshold = g_boundary_3d(s[1], s[2], boundary);
    r.decision = s[0] > r.threshold ? Decision::reject : Decision::accept;
    r.alpha = boundary.alpha();
    r.extras = {{"weight", weight_3d(s[2])}};
    return r;
}

TestReport lr_test(double t1, double t2, double alpha) {
    const double z = two_sided_critical_value(alpha);
    TestReport r;
    r.test = "lr";
    r.t_values = {t1, t2};
    r.statistic = std::min(std::abs(t1), std::abs(t2));
    r.threshold = z;
    r.decision = *r.statistic > z ? Decision::reject : Decision::accept;
    r.alpha = alpha;
    return r;
}

TestReport sobel_wald_test(double t1, double t2, double alpha) {
    const double a = t1 * t1, b = t2 * t2;
    if (a + b == 0.0) {
        throw Error(ErrorCode::undefined_statistic, "Wald statistic is undefined at t1 = t2 = 0");
    }
    const double z = two_sided_critical_value(alpha);
    TestReport r;
    r.test = "sobel-wald";
    r.t_values = {t1, t2};
    r.statistic = a * b / (a + b);
    r.threshold = z * z;  // chi-square(1) quantile
    r.decision = *r.statistic > r.threshold ? Decision::reject : Decision::accept;
    r.alpha = alpha;
    r.extras = {{"sobel", std::sqrt(*r.statistic)}, {"sobel_critical_value", z}};
    return r;
}

}  // namespace medtest
