#include "medtest/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "medtest/error.hpp"
#include "medtest/lp.hpp"
#include "medtest/parallel.hpp"

namespace medtest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bin_lo(std::size_t k, const EnvelopeProblem& p) { return static_cast<double>(k) * p.cell_size; }

double bin_hi(std::size_t k, const EnvelopeProblem& p) {
    return k == p.bins() ? kInf : static_cast<double>(k + 1) * p.cell_size;
}

using Matrix = std::vector<std::vector<double>>;

PointOptimalResult solve_point(const EnvelopeProblem& problem, const Matrix& null_probs,
                               const std::vector<double>& alt_probs) {
    const std::size_t n = alt_probs.size();
    const std::size_t m = null_probs.size();
    LinearProgram lp = LinearProgram::zeros(m, n);
    lp.objective = alt_probs;
    for (std::size_t r = 0; r < m; ++r) {
        std::copy(null_probs[r].begin(), null_probs[r].end(), lp.a.begin() + static_cast<std::ptrdiff_t>(r * n));
        lp.row_upper[r] = problem.alpha;
        lp.row_lower[r] = problem.nonsimilar ? -kInf : problem.alpha - problem.epsilon;
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::infeasible) {
        throw Error(ErrorCode::infeasible_constraints, "no cell selection satisfies the size constraints");
    }
    if (sol.status != LpStatus::optimal) {
        throw Error(ErrorCode::optimization_failure, "simplex iteration limit reached");
    }

    PointOptimalResult out;
    out.relaxed = sol.x;
    out.relaxed_power = sol.objective;
    out.lp_iterations = sol.iterations;

    // Rounding with repair: keep the integral cells, then add fractional
    // cells by descending alternative-to-null mass ratio while no upper size
    // constraint is broken.
    constexpr double kIntegral = 1e-9;
    out.selection.assign(n, 0);
    out.rounded_sizes.assign(m, 0.0);
    std::vector<std::size_t> fractional;
    for (std::size_t c = 0; c < n; ++c) {
        if (sol.x[c] >= 1.0 - kIntegral) {
            out.selection[c] = 1;
            for (std::size_t r = 0; r < m; ++r) out.rounded_sizes[r] += null_probs[r][c];
        } else if (sol.x[c] > kIntegral) {
            fractional.push_back(c);
        }
    }
    auto ratio = [&](std::size_t c) {
        double worst = 0.0;
        for (std::size_t r = 0; r < m; ++r) worst = std::max(worst, null_probs[r][c]);
        return worst > 0.0 ? alt_probs[c] / worst : kInf;
    };
    std::stable_sort(fractional.begin(), fractional.end(),
                     [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });
    for (std::size_t c : fractional) {
        bool fits = true;
        for (std::size_t r = 0; r < m && fits; ++r) fits = out.rounded_sizes[r] + null_probs[r][c] <= problem.alpha;
        if (!fits) continue;
        out.selection[c] = 1;
        for (std::size_t r = 0; r < m; ++r) out.rounded_sizes[r] += null_probs[r][c];
    }
    out.rounded_feasible = true;
    for (std::size_t r = 0; r < m; ++r) {
        const double s = out.rounded_sizes[r];
        if (s > problem.alpha || (!problem.nonsimilar && s < problem.alpha - problem.epsilon)) {
            out.rounded_feasible = false;
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (out.selection[c]) out.rounded_power += alt_probs[c];
    }
    return out;
}

}  // namespace

std::size_t EnvelopeProblem::bins() const {
    return static_cast<std::size_t>(std::llround(t_max / cell_size));
}

std::size_t EnvelopeProblem::cell_count() const {
    const std::size_t n = bins() + 1;
    return n * (n + 1) / 2;
}

std::size_t EnvelopeProblem::cell_index(std::size_t i, std::size_t j) const {
    return j * (j + 1) / 2 + i;
}

void EnvelopeProblem::validate() const {
    if (!(cell_size > 0.0) || !(t_max > 0.0) || !std::isfinite(t_max)) {
        throw Error(ErrorCode::domain_error, "cell size and t-max must be positive");
    }
    const double n = t_max / cell_size;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
        throw Error(ErrorCode::domain_error, "t-max must be a whole number of cells");
    }
    if (!(alpha > 0.0 && alpha < 1.0) || !(epsilon >= 0.0 && epsilon <= alpha)) {
        throw Error(ErrorCode::domain_error, "need 0 < alpha < 1 and 0 <= epsilon <= alpha");
    }
    if (null_points.empty()) throw Error(ErrorCode::domain_error, "need at least one null point");
    if (alt_point.size() != 2) throw Error(ErrorCode::unsupported_dimension, "envelope needs K = 2");
    for (const auto& mu : null_points) {
        if (mu.size() != 2) throw Error(ErrorCode::unsupported_dimension, "envelope needs K = 2");
    }
}

std::vector<Cell> cells(const EnvelopeProblem& problem) {
    problem.validate();
    const std::size_t n = problem.bins();
    std::vector<Cell> out;
    out.reserve(problem.cell_count());
    for (std::size_t j = 0; j <= n; ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            out.push_back({i, j, bin_lo(i, problem), bin_hi(i, problem), bin_lo(j, problem), bin_hi(j, problem)});
        }
    }
    return out;
}

std::vector<double> cell_probabilities(const Noncentrality& mu, const EnvelopeProblem& problem) {
    problem.validate();
    if (mu.size() != 2) throw Error(ErrorCode::unsupported_dimension, "cell probabilities need K = 2");
    const std::size_t n = problem.bins();
    // |T_1| and |T_2| are independent, so each cell mass is a sum of products
    // of per-bin folded-normal masses.
    std::vector<double> m1(n + 1), m2(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        m1[k] = folded_normal_mass(bin_lo(k, problem), bin_hi(k, problem), mu[0]);
        m2[k] = folded_normal_mass(bin_lo(k, problem), bin_hi(k, problem), mu[1]);
    }
    std::vector<double> p(problem.cell_count());
    for (std::size_t j = 0; j <= n; ++j) {
        for (std::size_t i = 0; i < j; ++i) p[problem.cell_index(i, j)] = m1[i] * m2[j] + m2[i] * m1[j];
        p[problem.cell_index(j, j)] = m1[j] * m2[j];
    }
    return p;
}

PointOptimalResult point_optimal_cr(const EnvelopeProblem& problem) {
    problem.validate();
    Matrix null_probs;
    for (const auto& mu : problem.null_points) null_probs.push_back(cell_probabilities(mu, problem));
    return solve_point(problem, null_probs, cell_probabilities(problem.alt_point, problem));
}

EnvelopeSurface power_envelope(std::span<const Noncentrality> alt_grid,
                               const EnvelopeProblem& problem, std::size_t threads) {
    problem.validate();
    Matrix null_probs(problem.null_points.size());
    parallel_for(
        null_probs.size(),
        [&](std::size_t r) { null_probs[r] = cell_probabilities(problem.null_points[r], problem); },
        threads);

    EnvelopeSurface out;
    out.relaxed.mu.assign(alt_grid.begin(), alt_grid.end());
    out.relaxed.values.assign(alt_grid.size(), 0.0);
    out.relaxed.errors.assign(alt_grid.size(), 0.0);
    out.relaxed.boundary_id = problem.nonsimilar ? "envelope-nonsimilar" : "envelope";
    out.rounded = out.relaxed;
    out.rounded.boundary_id += "-rounded";
    std::vector<char> feasible(alt_grid.size(), 0);
    parallel_for(
        alt_grid.size(),
        [&](std::size_t a) {
            const PointOptimalResult r = solve_point(problem, null_probs, cell_probabilities(alt_grid[a], problem));
            out.relaxed.values[a] = r.relaxed_power;
            out.rounded.values[a] = r.rounded_power;
            feasible[a] = r.rounded_feasible;
        },
        threads);
    out.rounded_feasible.assign(feasible.begin(), feasible.end());
    return out;
}

std::vector<Noncentrality> null_grid(std::size_t count, double mu_max) {
    if (count == 0 || !(mu_max >= 0.0)) throw Error(ErrorCode::domain_error, "null grid needs count >= 1 and mu_max >= 0");
    std::vector<Noncentrality> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double mu0 = count == 1 ? 0.0 : mu_max * static_cast<double>(k) / static_cast<double>(count - 1);
        out.emplace_back(std::vector<double>{0.0, mu0});
    }
    return out;
}

std::vector<Noncentrality> triangular_alt_grid(double step, double mu_max) {
    if (!(step > 0.0) || !(mu_max >= step)) throw Error(ErrorCode::domain_error, "alt grid needs 0 < step <= mu_max");
    const auto n = static_cast<std::size_t>(std::floor(mu_max / step + 1e-9));
    std::vector<Noncentrality> out;
    for (std::size_t b = 1; b <= n; ++b) {
        for (std::size_t a = 1; a <= b; ++a) {
            out.emplace_back(std::vector<double>{step * static_cast<double>(a), step * static_cast<double>(b)});
        }
    }
    return out;
}

std::string selection_to_delimited(const EnvelopeProblem& problem, std::span<const double> phi) {
    const auto all = cells(problem);
    if (phi.size() != all.size()) throw Error(ErrorCode::domain_error, "selection size does not match the cell count");
    std::string out = "i,j,t1_lo,t1_hi,t2_lo,t2_hi,phi\n";
    char line[256];
    for (std::size_t c = 0; c < all.size(); ++c) {
        if (phi[c] <= 0.0) continue;
        const Cell& s = all[c];
        std::snprintf(line, sizeof line, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.i, s.j, s.t1_lo, s.t1_hi,
                      s.t2_lo, s.t2_hi, phi[c]);
        out += line;
    }
    return out;
}

}  // namespace medtest
