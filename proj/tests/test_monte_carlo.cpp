#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "medtest/monte_carlo.hpp"
#include "medtest/normal.hpp"

using namespace medtest;

TEST(Philox, KnownAnswers) {
    const Philox4x32 zero(0);
    EXPECT_EQ(zero(0, 0), (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    const Philox4x32 ones(~0ull);
    EXPECT_EQ(ones(~0ull, ~0ull), (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, NormalsHaveUnitMoments) {
    const Philox4x32 gen(42);
    double s = 0.0, s2 = 0.0;
    const std::uint64_t n = 200000;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto z = gen.normal_pair(0, i);
        s += z[0] + z[1];
        s2 += z[0] * z[0] + z[1] * z[1];
    }
    EXPECT_NEAR(s / (2.0 * n), 0.0, 0.01);
    EXPECT_NEAR(s2 / (2.0 * n), 1.0, 0.01);
}

TEST(MonteCarlo, ReproducibleAcrossThreadCounts) {
    const std::vector<double> mu{0.5, 1.0};
    auto rule = [](std::span<const double> t) { return std::abs(t[0]) > 1.0 && std::abs(t[1]) > 1.0; };
    const auto a = monte_carlo_rp(rule, mu, 100000, 9, 1);
    const auto b = monte_carlo_rp(rule, mu, 100000, 9, 4);
    EXPECT_EQ(a.rejections, b.rejections);
    EXPECT_EQ(a.draws, 100000u);
    const auto c = monte_carlo_rp(rule, mu, 100000, 10, 4);
    EXPECT_NE(a.rejections, c.rejections);
}

TEST(MonteCarlo, MatchesClosedForm) {
    const std::vector<double> mu{0.5, 1.0};
    auto rule = [](std::span<const double> t) { return std::abs(t[0]) > 1.0 && std::abs(t[1]) > 1.0; };
    auto tail = [](double m) { return std_normal_sf(1.0 - m) + std_normal_cdf(-1.0 - m); };
    const double exact = tail(0.5) * tail(1.0);
    const auto r = monte_carlo_rp(rule, mu, 400000, 3);
    EXPECT_NEAR(r.estimate, exact, 4.0 * r.standard_error);
    EXPECT_NEAR(r.standard_error, std::sqrt(exact * (1 - exact) / 400000.0), 1e-4);
}
