#include "medtest/rp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "medtest/error.hpp"
#include "medtest/mediation.hpp"
#include "medtest/parallel.hpp"
#include "medtest/quadrature.hpp"

namespace medtest {

namespace {

void require_dimension(const Noncentrality& mu, std::size_t k) {
    if (mu.size() != k) {
        throw Error(ErrorCode::domain_error,
                    "expected a noncentrality vector of length " + std::to_string(k));
    }
}

void require_tolerance(double tol) {
    if (!(tol > 0.0)) throw Error(ErrorCode::domain_error, "quadrature tolerance must be positive");
}

}  // namespace

RPValue rejection_prob_frontier(const std::function<double(double)>& frontier,
                                std::span<const double> breakpoints, const Noncentrality& mu,
                                double tol, double truncation_margin) {
    require_dimension(mu, 2);
    require_tolerance(tol);
    const double m1 = mu[0], m2 = mu[1];
    // Integrand: density of |t|_(2) at t times P(b < |t|_(1) <= t | |t|_(2) = t).
    auto integrand = [&](double t) {
        const double b = std::clamp(frontier(t), 0.0, t);
        return folded_normal_kernel(t, m2) * folded_normal_mass(b, t, m1) +
               folded_normal_kernel(t, m1) * folded_normal_mass(b, t, m2);
    };
    const double upper = mu.max() + truncation_margin;
    QuadratureOptions options;
    options.abs_tol = tol;
    const QuadratureResult q = integrate(integrand, 0.0, upper, breakpoints, options);
    return {std::clamp(q.value, 0.0, 1.0), q.error};
}

RPValue rejection_prob(const Boundary& boundary, const Noncentrality& mu, double tol) {
    const std::vector<double> breaks = kinks(boundary);
    return rejection_prob_frontier([&](double t) { return eval(boundary, t); }, breaks, mu, tol);
}

KnotGradient rejection_prob_knot_gradient(const GBoundary& boundary, const Noncentrality& mu, double tol) {
    require_dimension(mu, 2);
    require_tolerance(tol);
    const auto& knots = boundary.knots();
    const double m1 = mu[0], m2 = mu[1];
    // Moving g_k shifts g(t) by the hat function of knot k, moving t_k shifts
    // it by minus the local slope times the same hat. The rejection
    // probability responds through the ordered density on the frontier.
    auto density_on_frontier = [&](double t) {
        const double b = std::clamp(boundary.eval(t), 0.0, t);
        return folded_normal_kernel(t, m2) * folded_normal_kernel(b, m1) +
               folded_normal_kernel(t, m1) * folded_normal_kernel(b, m2);
    };
    QuadratureOptions options;
    options.abs_tol = tol;
    const std::size_t n = knots.size();
    // rising[j]: integral of density * hat of knot j+1 over segment j;
    // falling[j]: same with the hat of knot j.
    std::vector<double> rising(n - 1), falling(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double a = knots[j].t, b = knots[j + 1].t;
        rising[j] = integrate([&](double t) { return density_on_frontier(t) * (t - a) / (b - a); }, a, b, {}, options).value;
        falling[j] = integrate([&](double t) { return density_on_frontier(t) * (b - t) / (b - a); }, a, b, {}, options).value;
    }
    KnotGradient grad{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            const double slope = (knots[k].g - knots[k - 1].g) / (knots[k].t - knots[k - 1].t);
            grad.ordinate[k] -= rising[k - 1];
            grad.abscissa[k] += slope * rising[k - 1];
        }
        if (k + 1 < n) {
            const double slope = (knots[k + 1].g - knots[k].g) / (knots[k + 1].t - knots[k].t);
            grad.ordinate[k] -= falling[k];
            grad.abscissa[k] += slope * falling[k];
        }
    }
    return grad;
}

RPValue wald_rejection_prob(double chi2_critical_value, const Noncentrality& mu, double tol) {
    const double c = chi2_critical_value;
    if (!(c > 0.0)) throw Error(ErrorCode::domain_error, "Wald critical value must be positive");
    // In the octant W > c is t1 > sqrt(c t2^2 / (t2^2 - c)), which drops below
    // the diagonal once t2 exceeds sqrt(2c).
    auto frontier = [c](double t) {
        const double tt = t * t;
        if (tt <= c) return t;
        return std::min(t, std::sqrt(c * tt / (tt - c)));
    };
    const double breaks[] = {std::sqrt(2.0 * c)};
    return rejection_prob_frontier(frontier, breaks, mu, tol);
}

RPGrid rp_grid(const Boundary& boundary, std::span<const Noncentrality> points, double tol,
               std::string boundary_id, std::size_t threads) {
    RPGrid grid;
    grid.mu.assign(points.begin(), points.end());
    grid.values.resize(points.size());
    grid.errors.resize(points.size());
    grid.boundary_id = std::move(boundary_id);
    parallel_for(
        points.size(),
        [&](std::size_t i) {
            const RPValue v = rejection_prob(boundary, points[i], tol);
            grid.values[i] = v.value;
            grid.errors[i] = v.error;
        },
        threads);
    return grid;
}

RPGrid nrp_curve(const Boundary& boundary, std::span<const double> mu0_grid, double tol,
                 std::string boundary_id, std::size_t threads) {
    std::vector<Noncentrality> points;
    points.reserve(mu0_grid.size());
    for (double m : mu0_grid) points.push_back(Noncentrality::from_unordered(std::vector{0.0, m}));
    return rp_grid(boundary, points, tol, std::move(boundary_id), threads);
}

std::string RPGrid::to_delimited() const {
    std::ostringstream out;
    const std::size_t k = mu.empty() ? 2 : mu.front().size();
    for (std::size_t j = 0; j < k; ++j) out << "mu" << (j + 1) << ',';
    out << "value,error\n";
    char buf[64];
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (double m : mu[i].values()) {
            std::snprintf(buf, sizeof buf, "%.17g,", m);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.3g\n", values[i], errors[i]);
        out << buf;
    }
    return out.str();
}

RPValue rejection_prob_3d(const Noncentrality& mu, double tol, Rule3D rule,
                          const GBoundary& boundary) {
    require_dimension(mu, 3);
    require_tolerance(tol);
    const double m[3] = {mu[0], mu[1], mu[2]};
    const double z = boundary.tail();
    const double upper = mu.max() + kTruncationMargin;

    std::vector<double> inner_breaks;
    for (const Knot& k : boundary.knots()) inner_breaks.push_back(k.t);
    inner_breaks.push_back(z);
    std::vector<double> outer_breaks = inner_breaks;
    for (double w : {1.35, 2.025, 2.7}) outer_breaks.push_back(w);

    QuadratureOptions outer_opts;
    outer_opts.abs_tol = 0.5 * tol;
    QuadratureOptions inner_opts;
    inner_opts.abs_tol = 0.5 * tol / upper;

    auto outer = [&](double s3) {
        double chi3[3];
        for (int j = 0; j < 3; ++j) chi3[j] = folded_normal_kernel(s3, m[j]);
        auto inner = [&](double s2) {
            const double g = rule == Rule3D::weighted ? g_boundary_3d(s2, s3, boundary)
                                                      : boundary.eval(s2);
            const double b = std::clamp(g, 0.0, s2);
            double chi2[3];
            for (int j = 0; j < 3; ++j) chi2[j] = folded_normal_kernel(s2, m[j]);
            // Permanent expansion: mu_k goes with |t|_(1), the other two are
            // shared between |t|_(2) and |t|_(3) in both orders.
            double sum = 0.0;
            for (int k = 0; k < 3; ++k) {
                const int a = (k + 1) % 3, c = (k + 2) % 3;
                const double pair = chi2[a] * chi3[c] + chi2[c] * chi3[a];
                sum += folded_normal_mass(b, s2, m[k]) * pair;
            }
            return sum;
        };
        return integrate(inner, 0.0, s3, inner_breaks, inner_opts).value;
    };
    const QuadratureResult q = integrate(outer, 0.0, upper, outer_breaks, outer_opts);
    return {std::clamp(q.value, 0.0, 1.0), q.error + 0.5 * tol};
}

}  // namespace medtest
