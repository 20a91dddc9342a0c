#include "medtest/optimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "medtest/error.hpp"
#include "medtest/lp.hpp"
#include "medtest/normal.hpp"
#include "medtest/parallel.hpp"

namespace medtest {

namespace {

constexpr double kMinKnotGap = 1e-3;
// Linearized size rows aim this fraction of the band inside alpha.
constexpr double kMarginFraction = 0.02;

// Knots (x_k, g_k), k = 0 .. J+1. The ends (0, 0) and (t_end, z) are fixed,
// the knot at x = z keeps its abscissa; every other interior abscissa and
// every interior ordinate is free.
struct Spline {
    std::vector<double> x;
    std::vector<double> g;
    std::size_t pinned = 1;

    std::size_t free_count() const { return x.size() - 2; }
    bool movable(std::size_t k) const { return k > 0 && k + 1 < x.size() && k != pinned; }

    // Parameter layout: ordinates g_1 .. g_J, then the movable abscissae.
    std::vector<std::ptrdiff_t> ordinate_slots() const {
        std::vector<std::ptrdiff_t> slot(x.size(), -1);
        for (std::size_t k = 1; k + 1 < x.size(); ++k) slot[k] = static_cast<std::ptrdiff_t>(k - 1);
        return slot;
    }
    std::vector<std::ptrdiff_t> abscissa_slots() const {
        std::vector<std::ptrdiff_t> slot(x.size(), -1);
        std::ptrdiff_t next = static_cast<std::ptrdiff_t>(free_count());
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (movable(k)) slot[k] = next++;
        }
        return slot;
    }
    std::size_t parameter_count() const { return 2 * free_count() - 1; }

    void apply(std::span<const double> step) {
        const auto gs = ordinate_slots(), xs = abscissa_slots();
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (gs[k] >= 0) g[k] += step[static_cast<std::size_t>(gs[k])];
            if (xs[k] >= 0) x[k] += step[static_cast<std::size_t>(xs[k])];
        }
    }
};

Spline initial_spline(double z, double t_end) {
    return {{0.0, z, t_end}, {0.0, z, z}, 1};
}

// Inserts midpoints of the widest intervals until there are `target` free
// knots. Ordinates come from the current interpolant, so g is unchanged.
void refine(Spline& s, std::size_t target) {
    while (s.free_count() < target) {
        std::size_t widest = 0;
        for (std::size_t k = 1; k + 1 < s.x.size(); ++k) {
            if (s.x[k + 1] - s.x[k] > s.x[widest + 1] - s.x[widest] + 1e-12) widest = k;
        }
        const double xm = 0.5 * (s.x[widest] + s.x[widest + 1]);
        const double gm = 0.5 * (s.g[widest] + s.g[widest + 1]);
        s.x.insert(s.x.begin() + static_cast<std::ptrdiff_t>(widest + 1), xm);
        s.g.insert(s.g.begin() + static_cast<std::ptrdiff_t>(widest + 1), gm);
        if (widest + 1 <= s.pinned) ++s.pinned;
    }
}

// Restores the knot constraints: abscissae increasing with a minimum gap,
// then increments 0 <= g_{j+1} - g_j <= x_{j+1} - x_j with both end
// ordinates fixed (clipped after a common shift chosen so they add up to z).
void project(Spline& s) {
    const std::size_t n = s.x.size();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (s.movable(k)) s.x[k] = std::max(s.x[k], s.x[k - 1] + kMinKnotGap);
    }
    for (std::size_t k = n - 2; k >= 1; --k) {
        if (s.movable(k)) s.x[k] = std::min(s.x[k], s.x[k + 1] - kMinKnotGap);
    }
    const double total = s.g.back();
    std::vector<double> d(n - 1), cap(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        d[j] = s.g[j + 1] - s.g[j];
        cap[j] = s.x[j + 1] - s.x[j];
    }
    auto sum_at = [&](double lambda) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) acc += std::clamp(d[j] - lambda, 0.0, cap[j]);
        return acc;
    };
    double lo = *std::min_element(d.begin(), d.end()) - *std::max_element(cap.begin(), cap.end());
    double hi = *std::max_element(d.begin(), d.end());
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sum_at(mid) > total ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    double acc = 0.0;
    for (std::size_t j = 0; j + 2 < n; ++j) {
        acc += std::clamp(d[j] - lambda, 0.0, cap[j]);
        s.g[j + 1] = std::min({acc, s.g[j] + cap[j], total});
        s.g[j + 1] = std::max(s.g[j + 1], s.g[j]);
    }
}

GBoundary to_boundary(const Spline& s, double alpha) {
    std::vector<Knot> knots;
    for (std::size_t k = 0; k < s.x.size(); ++k) knots.push_back({s.x[k], s.g[k]});
    return GBoundary(std::move(knots), two_sided_critical_value(alpha), alpha);
}

Spline from_boundary(const GBoundary& b, double t_end) {
    Spline s;
    for (const Knot& k : b.knots()) {
        s.x.push_back(k.t);
        s.g.push_back(k.g);
    }
    if (s.x.back() < t_end - 1e-12) {
        s.x.push_back(t_end);
        s.g.push_back(b.tail());
    }
    if (std::abs(s.x.back() - t_end) > 1e-9 || std::abs(s.g.back() - b.tail()) > 1e-9 || s.x.size() < 3) {
        throw Error(ErrorCode::domain_error, "starting boundary must reach its tail at t_end");
    }
    const double z = b.tail();
    std::size_t best = 1;
    for (std::size_t k = 1; k + 1 < s.x.size(); ++k) {
        if (std::abs(s.x[k] - z) < std::abs(s.x[best] - z)) best = k;
    }
    s.pinned = best;
    return s;
}

struct Evaluation {
    std::vector<double> nrp;
    double q = 0.0;
    double epsilon = 0.0;
    double max_nrp = 0.0;
};

class Problem {
public:
    explicit Problem(const OptimizeConfig& c) : c_(c) {
        for (double m : c.null_grid) nulls_.push_back(Noncentrality::from_unordered(std::vector{0.0, m}));
    }

    Evaluation evaluate(const Spline& s) const {
        const Boundary b = to_boundary(s, c_.alpha);
        Evaluation e;
        e.nrp.resize(nulls_.size());
        parallel_for(
            nulls_.size(), [&](std::size_t i) { e.nrp[i] = rejection_prob(b, nulls_[i], c_.tol).value; },
            c_.threads);
        e.q = q_value(e.nrp, c_.alpha);
        e.epsilon = c_.alpha - *std::min_element(e.nrp.begin(), e.nrp.end());
        e.max_nrp = *std::max_element(e.nrp.begin(), e.nrp.end());
        return e;
    }

    // Rows: points, columns: spline parameters.
    Eigen::MatrixXd jacobian(const Spline& s, std::span<const Noncentrality> points) const {
        const GBoundary b = to_boundary(s, c_.alpha);
        const auto gs = s.ordinate_slots(), xs = s.abscissa_slots();
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()),
                                                    static_cast<Eigen::Index>(s.parameter_count()));
        parallel_for(
            points.size(),
            [&](std::size_t i) {
                const KnotGradient grad = rejection_prob_knot_gradient(b, points[i], c_.tol);
                const auto row = static_cast<Eigen::Index>(i);
                for (std::size_t k = 0; k < s.x.size(); ++k) {
                    if (gs[k] >= 0) jac(row, gs[k]) = grad.ordinate[k];
                    if (xs[k] >= 0) jac(row, xs[k]) = grad.abscissa[k];
                }
            },
            c_.threads);
        return jac;
    }

    std::vector<double> power(const Spline& s, std::span<const Noncentrality> points) const {
        const Boundary b = to_boundary(s, c_.alpha);
        std::vector<double> p(points.size());
        parallel_for(
            points.size(), [&](std::size_t i) { p[i] = rejection_prob(b, points[i], c_.tol).value; }, c_.threads);
        return p;
    }

    // NRP values carry quadrature error up to tol; the size bound allows for it.
    double slack() const { return 10.0 * c_.tol; }
    bool feasible(const Evaluation& e) const { return e.max_nrp <= c_.alpha + slack(); }
    double violation(const Evaluation& e) const { return std::max(0.0, e.max_nrp - c_.alpha - slack()); }
    // Less size violation wins; between feasible points, smaller epsilon.
    bool closer_to_band(const Evaluation& cand, const Evaluation& cur) const {
        if (violation(cur) > 0.0) return violation(cand) < violation(cur);
        return feasible(cand) && cand.epsilon < cur.epsilon;
    }
    const std::vector<Noncentrality>& nulls() const { return nulls_; }

private:
    const OptimizeConfig& c_;
    std::vector<Noncentrality> nulls_;
};

void record(std::vector<OptimizeLogEntry>& log, const OptimizeConfig& c, OptimizeLogEntry entry) {
    if (c.on_progress) c.on_progress(entry);
    log.push_back(std::move(entry));
}

// Levenberg-Marquardt on the residuals NRP - (alpha - delta), where delta is
// a fraction of the current epsilon so proposals aim inside the size bound.
// Only feasible proposals that lower Q are accepted.
bool minimize_q(const OptimizeConfig& c, const Problem& problem, Spline& s, Evaluation& cur,
                std::vector<OptimizeLogEntry>& log) {
    const std::size_t J = s.free_count();
    double lambda = 1e-3;
    double shift = 0.5;
    for (std::size_t it = 1; it <= c.max_iterations; ++it) {
        const Eigen::MatrixXd jac = problem.jacobian(s, problem.nulls());
        const double target = c.alpha - shift * cur.epsilon;
        Eigen::VectorXd r(static_cast<Eigen::Index>(cur.nrp.size()));
        for (std::size_t i = 0; i < cur.nrp.size(); ++i) r(static_cast<Eigen::Index>(i)) = cur.nrp[i] - target;
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        bool accepted = false;
        while (lambda < 1e10) {
            Eigen::MatrixXd m = jtj;
            for (Eigen::Index k = 0; k < m.rows(); ++k) m(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd step = m.ldlt().solve(-jtr);
            Spline cand = s;
            cand.apply(std::span<const double>(step.data(), static_cast<std::size_t>(step.size())));
            project(cand);
            const Evaluation e = problem.evaluate(cand);
            if (problem.feasible(e) && e.q < cur.q) {
                const double gain = cur.q - e.q;
                s = std::move(cand);
                cur = e;
                lambda = std::max(lambda / 4.0, 1e-9);
                shift = std::max(shift / 1.25, 0.05);
                accepted = true;
                record(log, c, {"basic", J, it, cur.q, cur.epsilon, cur.max_nrp, 0.0});
                if (gain < 1e-12 || gain < 1e-9 * cur.q) return true;
                break;
            }
            if (!problem.feasible(e)) shift = std::min(shift * 1.5, 0.95);
            lambda *= 4.0;
        }
        if (!accepted) return true;
    }
    return false;
}

// One sequential-LP step on the spline parameters within |step| <= radius.
// Linearized size rows must stay below alpha - margin. With band_variable the
// LP minimizes e subject to NRP + jac step >= alpha - e; otherwise it
// maximizes objective . step with NRP + jac step >= alpha - epsilon + margin.
// An elastic column absorbs any row the trust region cannot satisfy, at a
// cost that dominates the objective. Knot constraints enter linearly.
std::vector<double> slp_step(const Spline& s, const Eigen::MatrixXd& jac, const Evaluation& cur,
                             const std::vector<double>& objective, double alpha, double epsilon,
                             double margin, double radius, bool band_variable) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t P = s.parameter_count();
    const std::size_t n_null = static_cast<std::size_t>(jac.rows());
    const std::size_t segments = s.x.size() - 1;
    const std::size_t band = P, elastic = P + 1;
    const std::size_t cols = P + 2;
    LinearProgram lp = LinearProgram::zeros(2 * n_null + 3 * segments, cols);
    double scale = 1.0;
    for (std::size_t k = 0; k < P; ++k) {
        lp.col_lower[k] = -radius;
        lp.col_upper[k] = radius;
        lp.objective[k] = band_variable ? 0.0 : objective[k];
        scale += std::abs(lp.objective[k]);
    }
    lp.col_lower[band] = 0.0;
    lp.col_upper[band] = band_variable ? alpha : 0.0;
    lp.objective[band] = -1.0;
    lp.col_upper[elastic] = alpha;
    lp.objective[elastic] = -100.0 * scale;
    for (std::size_t i = 0; i < n_null; ++i) {
        const std::size_t up = 2 * i, lo = up + 1;
        for (std::size_t k = 0; k < P; ++k) {
            const double d = jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            lp.at(up, k) = d;
            lp.at(lo, k) = d;
        }
        lp.at(up, elastic) = -1.0;
        lp.row_upper[up] = alpha - margin - cur.nrp[i];
        if (band_variable) {
            lp.at(lo, band) = 1.0;
            lp.row_lower[lo] = alpha - cur.nrp[i];
        } else {
            lp.at(lo, elastic) = 1.0;
            lp.row_lower[lo] = alpha - epsilon + margin - cur.nrp[i];
        }
    }
    const auto gs = s.ordinate_slots(), xs = s.abscissa_slots();
    auto put = [&](std::size_t row, std::ptrdiff_t slot, double coef) {
        if (slot >= 0) lp.at(row, static_cast<std::size_t>(slot)) += coef;
    };
    for (std::size_t j = 0; j < segments; ++j) {
        const double inc = s.g[j + 1] - s.g[j];
        const double width = s.x[j + 1] - s.x[j];
        const std::size_t mono = 2 * n_null + 3 * j, slope = mono + 1, gap = mono + 2;
        put(mono, gs[j + 1], 1.0);
        put(mono, gs[j], -1.0);
        lp.row_lower[mono] = -inc;
        put(slope, gs[j + 1], 1.0);
        put(slope, gs[j], -1.0);
        put(slope, xs[j + 1], -1.0);
        put(slope, xs[j], 1.0);
        lp.row_upper[slope] = width - inc;
        put(gap, xs[j + 1], 1.0);
        put(gap, xs[j], -1.0);
        lp.row_lower[gap] = kMinKnotGap - width;
        lp.row_upper[gap] = inf;
    }
    LpSolution sol;
    try {
        sol = solve_lp(lp);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::accuracy_failure) throw;
        return {};
    }
    if (sol.status != LpStatus::optimal) return {};
    return std::vector<double>(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(P));
}

// Sequential linear programming on the minimax problem: shrink epsilon while
// keeping NRP <= alpha, until epsilon <= goal or no trust radius helps.
bool shrink_epsilon(const OptimizeConfig& c, const Problem& problem, Spline& s, Evaluation& cur,
                    std::vector<OptimizeLogEntry>& log, double goal, const char* phase) {
    const std::size_t J = s.free_count();
    double radius = 0.05;
    const std::vector<double> none(s.parameter_count(), 0.0);
    for (std::size_t it = 1; it <= c.max_iterations; ++it) {
        if (cur.epsilon <= goal) return true;
        const Eigen::MatrixXd jac = problem.jacobian(s, problem.nulls());
        bool accepted = false;
        while (radius > 1e-9) {
            const auto step = slp_step(s, jac, cur, none, c.alpha, 0.0, kMarginFraction * cur.epsilon, radius, true);
            if (step.empty()) {
                radius /= 2.0;
                continue;
            }
            Spline cand = s;
            cand.apply(step);
            project(cand);
            const Evaluation e = problem.evaluate(cand);
            if (problem.closer_to_band(e, cur)) {
                s = std::move(cand);
                cur = e;
                radius = std::min(radius * 1.5, 0.2);
                accepted = true;
                record(log, c, {phase, J, it, cur.q, cur.epsilon, cur.max_nrp, 0.0});
                break;
            }
            radius /= 2.0;
        }
        if (!accepted) return true;
    }
    return false;
}

}  // namespace

void OptimizeConfig::validate() const {
    if (knots == 0) throw Error(ErrorCode::domain_error, "need at least one free knot");
    if (null_grid.size() <= knots) throw Error(ErrorCode::domain_error, "null grid must have more points than free knots");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::invalid_probability, "alpha must lie in (0, 1)");
    if (!(epsilon >= 0.0 && epsilon <= alpha)) throw Error(ErrorCode::domain_error, "need 0 <= epsilon <= alpha");
    if (!(tol > 0.0)) throw Error(ErrorCode::domain_error, "tolerance must be positive");
    if (!(t_end > two_sided_critical_value(alpha))) throw Error(ErrorCode::domain_error, "t_end must exceed z_{alpha/2}");
    for (double m : null_grid) {
        if (!std::isfinite(m) || m < 0.0) throw Error(ErrorCode::domain_error, "null grid values must be finite and >= 0");
    }
}

std::vector<double> default_null_grid() {
    std::vector<double> grid;
    for (int k = 0; k < 60; ++k) grid.push_back(6.0 * k / 59.0);
    for (int k = 1; k <= 16; ++k) grid.push_back(6.0 + 14.0 * k / 16.0);
    return grid;
}

double q_value(std::span<const double> nrp, double alpha) {
    double q = 0.0;
    for (double v : nrp) q += (v - alpha) * (v - alpha);
    return q;
}

OptimizeResult basic_varying_g(const OptimizeConfig& config) {
    config.validate();
    const double z = two_sided_critical_value(config.alpha);
    const Problem problem(config);
    Spline s = initial_spline(z, config.t_end);
    Evaluation cur = problem.evaluate(s);
    std::vector<OptimizeLogEntry> log;
    record(log, config, {"start", 0, 0, cur.q, cur.epsilon, cur.max_nrp, 0.0});
    bool converged = true;
    double prev_q = std::numeric_limits<double>::infinity();
    for (std::size_t J = 1;; J = std::min(2 * J, config.knots)) {
        refine(s, J);
        converged = shrink_epsilon(config, problem, s, cur, log, 0.0, "minimax");
        converged = minimize_q(config, problem, s, cur, log) && converged;
        const bool small_gain = prev_q - cur.q < config.min_improvement * prev_q;
        prev_q = cur.q;
        if (J == config.knots || small_gain) break;
    }
    OptimizeConfig quiet = config;
    quiet.on_progress = nullptr;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (std::size_t r = 1; r <= config.restarts; ++r) {
        Spline trial = s;
        for (std::size_t k = 1; k + 1 < trial.x.size(); ++k) {
            trial.g[k] += jitter(rng);
            if (trial.movable(k)) trial.x[k] += jitter(rng);
        }
        project(trial);
        Evaluation e = problem.evaluate(trial);
        std::vector<OptimizeLogEntry> trial_log;
        shrink_epsilon(quiet, problem, trial, e, trial_log, 0.0, "restart");
        minimize_q(quiet, problem, trial, e, trial_log);
        if (problem.feasible(e) && e.q < cur.q) {
            s = std::move(trial);
            cur = e;
            record(log, config, {"restart", s.free_count(), r, cur.q, cur.epsilon, cur.max_nrp, 0.0});
        }
    }
    OptimizeResult out{to_boundary(s, config.alpha), cur.epsilon, cur.q, cur.nrp, {}, 0.0, std::move(log), converged};
    return out;
}

OptimizeResult optimal_varying_g(const OptimizeConfig& config, const RPGrid& envelope, const GBoundary* start) {
    config.validate();
    std::vector<Noncentrality> alts = config.alt_grid.empty() ? envelope.mu : config.alt_grid;
    if (alts.empty() || envelope.values.size() != alts.size()) {
        throw Error(ErrorCode::domain_error, "envelope must be computed on the alternative grid");
    }
    const Problem problem(config);
    OptimizeResult basic;
    Spline s;
    if (start != nullptr) {
        s = from_boundary(*start, config.t_end);
    } else {
        basic = basic_varying_g(config);
        s = from_boundary(basic.boundary, config.t_end);
    }
    Evaluation cur = problem.evaluate(s);
    std::vector<double> power = problem.power(s, alts);
    auto gap_stats = [&](const std::vector<double>& p) {
        double sum = 0.0, worst = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) {
            sum += envelope.values[a] - p[a];
            worst = std::max(worst, envelope.values[a] - p[a]);
        }
        return std::pair{sum, worst};
    };
    std::vector<OptimizeLogEntry> log = std::move(basic.log);
    const std::size_t J = s.free_count();
    auto in_band = [&](const Evaluation& e) { return problem.feasible(e) && e.epsilon <= config.epsilon; };

    // Phase 1: shrink epsilon into the band. Phase 2: raise power inside it.
    double radius = 0.05;
    bool converged = false;
    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        const bool phase1 = !in_band(cur);
        const Eigen::MatrixXd jac = problem.jacobian(s, problem.nulls());
        std::vector<double> objective(s.parameter_count(), 0.0);
        if (!phase1) {
            const Eigen::MatrixXd pj = problem.jacobian(s, alts);
            for (std::size_t k = 0; k < objective.size(); ++k) objective[k] = pj.col(static_cast<Eigen::Index>(k)).sum();
        }
        bool accepted = false;
        while (radius > 1e-9) {
            const auto step = slp_step(s, jac, cur, objective, config.alpha, config.epsilon, kMarginFraction * (phase1 ? cur.epsilon : config.epsilon), radius, phase1);
            if (step.empty()) {
                radius /= 2.0;
                continue;
            }
            Spline cand = s;
            cand.apply(step);
            project(cand);
            const Evaluation e = problem.evaluate(cand);
            bool better = false;
            std::vector<double> cand_power;
            if (phase1) {
                better = problem.closer_to_band(e, cur);
            } else if (in_band(e)) {
                cand_power = problem.power(cand, alts);
                better = std::accumulate(cand_power.begin(), cand_power.end(), 0.0) >
                         std::accumulate(power.begin(), power.end(), 0.0);
            }
            if (better) {
                s = std::move(cand);
                cur = e;
                if (!phase1) power = std::move(cand_power);
                radius = std::min(radius * 1.5, 0.2);
                accepted = true;
                break;
            }
            radius /= 2.0;
        }
        const auto [sum_gap, worst_gap] = gap_stats(power);
        record(log, config,
               {phase1 ? "band" : "power", J, it, cur.q, cur.epsilon, cur.max_nrp,
                sum_gap / static_cast<double>(alts.size())});
        if (!accepted) {
            converged = true;
            break;
        }
    }
    if (!in_band(cur)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "epsilon band not reached: best epsilon %.3g, max NRP %.10f", cur.epsilon,
                      cur.max_nrp);
        throw Error(ErrorCode::infeasible_constraints, msg);
    }
    power = problem.power(s, alts);
    const double worst_gap = gap_stats(power).second;
    OptimizeResult out{to_boundary(s, config.alpha), cur.epsilon, cur.q, cur.nrp, power, worst_gap, std::move(log),
                       converged};
    return out;
}

std::string log_to_delimited(std::span<const OptimizeLogEntry> log) {
    std::string out = "phase,knots,iteration,q,epsilon,max_nrp,power_gap\n";
    char line[256];
    for (const auto& e : log) {
        std::snprintf(line, sizeof line, "%s,%zu,%zu,%.17g,%.17g,%.17g,%.17g\n", e.phase.c_str(), e.knots,
                      e.iteration, e.q, e.epsilon, e.max_nrp, e.power_gap);
        out += line;
    }
    return out;
}

}  // namespace medtest
