#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "medtest/lp.hpp"

using namespace medtest;

namespace {

// Fractional knapsack optimum by ratio ordering.
double greedy_knapsack(const std::vector<double>& v, const std::vector<double>& w, double cap) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] / w[a] > v[b] / w[b]; });
    double total = 0.0;
    for (auto i : order) {
        const double take = std::min(1.0, cap / w[i]);
        if (take <= 0.0) break;
        total += take * v[i];
        cap -= take * w[i];
    }
    return total;
}

}  // namespace

TEST(Simplex, FractionalKnapsackMatchesGreedy) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 40;
        std::vector<double> v(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = u(rng);
            w[i] = u(rng);
        }
        const double cap = 5.0;
        LinearProgram lp = LinearProgram::zeros(1, n);
        for (std::size_t i = 0; i < n; ++i) lp.at(0, i) = w[i];
        lp.objective = v;
        lp.row_upper[0] = cap;
        const auto s = solve_lp(lp);
        ASSERT_EQ(s.status, LpStatus::optimal);
        EXPECT_NEAR(s.objective, greedy_knapsack(v, w, cap), 1e-9);
        double used = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_GE(s.x[i], -1e-12);
            EXPECT_LE(s.x[i], 1.0 + 1e-12);
            used += w[i] * s.x[i];
        }
        EXPECT_LE(used, cap + 1e-9);
    }
}

TEST(Simplex, RangedRowsNeedPhaseOne) {
    // max x0 + x1 with 0.5 <= x0 - x1 <= 0.6 and 1.2 <= x0 + 2 x1
    LinearProgram lp = LinearProgram::zeros(2, 2);
    lp.at(0, 0) = 1.0;
    lp.at(0, 1) = -1.0;
    lp.row_lower[0] = 0.5;
    lp.row_upper[0] = 0.6;
    lp.at(1, 0) = 1.0;
    lp.at(1, 1) = 2.0;
    lp.row_lower[1] = 1.2;
    lp.objective = {1.0, 1.0};
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.x[0], 1.0, 1e-12);
    EXPECT_NEAR(s.x[1], 0.5, 1e-12);
    EXPECT_NEAR(s.objective, 1.5, 1e-12);
}

TEST(Simplex, DetectsInfeasibility) {
    LinearProgram lp = LinearProgram::zeros(1, 3);
    for (std::size_t i = 0; i < 3; ++i) lp.at(0, i) = 1.0;
    lp.row_lower[0] = 3.5;
    lp.objective = {1.0, 0.0, 0.0};
    EXPECT_EQ(solve_lp(lp).status, LpStatus::infeasible);
}

TEST(Simplex, NoRowsPutsColumnsAtBestBound) {
    LinearProgram lp = LinearProgram::zeros(0, 3);
    lp.objective = {2.0, -1.0, 0.5};
    lp.col_lower = {-1.0, -2.0, 0.0};
    lp.col_upper = {3.0, 4.0, 1.0};
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_EQ(s.x, (std::vector<double>{3.0, -2.0, 1.0}));
    EXPECT_NEAR(s.objective, 8.5, 1e-15);
}

TEST(Simplex, IterationLimitIsReported) {
    LinearProgram lp = LinearProgram::zeros(1, 50);
    for (std::size_t i = 0; i < 50; ++i) {
        lp.at(0, i) = 1.0 + i % 7;
        lp.objective[i] = 1.0 + i % 5;
    }
    lp.row_upper[0] = 10.0;
    lp.row_lower[0] = 9.0;
    EXPECT_EQ(solve_lp(lp, 1).status, LpStatus::iteration_limit);
}
