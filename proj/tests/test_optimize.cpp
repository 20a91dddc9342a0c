#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "medtest/error.hpp"
#include "medtest/normal.hpp"
#include "medtest/optimize.hpp"
#include "medtest/rp.hpp"

using namespace medtest;

namespace {

OptimizeConfig small_config() {
    OptimizeConfig c;
    c.knots = 2;
    c.restarts = 1;
    c.tol = 1e-9;
    c.max_iterations = 40;
    for (int k = 0; k <= 12; ++k) c.null_grid.push_back(0.5 * k);
    return c;
}

}  // namespace

TEST(Optimize, QValue) {
    const double nrp[] = {0.049, 0.05, 0.0495};
    EXPECT_NEAR(q_value(nrp, 0.05), 1e-6 + 0.25e-6, 1e-18);
}

TEST(Optimize, DefaultNullGrid) {
    const auto g = default_null_grid();
    ASSERT_EQ(g.size(), 76u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_NEAR(g[59], 6.0, 1e-12);
    EXPECT_NEAR(g.back(), 20.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(Optimize, ConfigValidation) {
    auto c = small_config();
    c.null_grid.clear();
    EXPECT_THROW(c.validate(), Error);
    c = small_config();
    c.knots = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Optimize, BasicRunImprovesOnLikelihoodRatio) {
    auto c = small_config();
    std::size_t progress = 0;
    c.on_progress = [&](const OptimizeLogEntry&) { ++progress; };
    const auto r = basic_varying_g(c);
    const double z = two_sided_critical_value(0.05);

    // the result is a valid boundary reaching z by t_end, with a knot at z
    EXPECT_NEAR(r.boundary.tail(), z, 1e-12);
    EXPECT_NEAR(r.boundary.eval(c.t_end), z, 1e-12);
    const auto& k = r.boundary.knots();
    EXPECT_TRUE(std::any_of(k.begin(), k.end(), [&](const Knot& n) { return std::abs(n.t - z) < 1e-12; }));

    // reported NRPs are reproducible and respect the size constraint
    ASSERT_EQ(r.nrp.size(), c.null_grid.size());
    double lo = 1.0;
    for (std::size_t i = 0; i < c.null_grid.size(); ++i) {
        const double v = rejection_prob(r.boundary, Noncentrality{0.0, c.null_grid[i]}, c.tol).value;
        EXPECT_NEAR(v, r.nrp[i], 1e-8);
        EXPECT_LE(v, c.alpha + 1e-8);
        lo = std::min(lo, v);
    }
    EXPECT_NEAR(r.epsilon, c.alpha - lo, 1e-8);
    EXPECT_NEAR(r.q, q_value(r.nrp, c.alpha), 1e-15);
    // LR rejects with probability 0.0025 at the origin
    EXPECT_GT(lo, 0.03);
    EXPECT_FALSE(r.log.empty());
    EXPECT_EQ(progress, r.log.size());

    const auto text = log_to_delimited(r.log);
    EXPECT_EQ(text.substr(0, text.find('\n')), "phase,knots,iteration,q,epsilon,max_nrp,power_gap");
}

TEST(Optimize, SameSeedSameResult) {
    auto c = small_config();
    c.knots = 1;
    c.restarts = 2;
    const auto a = basic_varying_g(c);
    const auto b = basic_varying_g(c);
    EXPECT_EQ(a.boundary, b.boundary);
}
