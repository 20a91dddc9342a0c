#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "medtest/dist.hpp"
#include "medtest/error.hpp"
#include "medtest/normal.hpp"
#include "medtest/quadrature.hpp"

using namespace medtest;

TEST(Normal, CdfAndQuantileAnchors) {
    EXPECT_NEAR(std_normal_cdf(1.959963984540054), 0.975, 1e-15);
    EXPECT_NEAR(std_normal_cdf(0.0), 0.5, 1e-16);
    EXPECT_NEAR(std_normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(std_normal_quantile(0.525), 0.06270677794321385, 1e-12);
    EXPECT_NEAR(two_sided_critical_value(0.05), 1.959963984540054, 1e-12);
    EXPECT_NEAR(std_normal_pdf(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-16);
}

TEST(Normal, TailsKeepRelativeAccuracy) {
    // sf(10) = 7.619853024160527e-24
    EXPECT_NEAR(std_normal_sf(10.0) / 7.619853024160527e-24, 1.0, 1e-12);
    EXPECT_NEAR(std_normal_interval(-1.0, 1.0), 0.6826894921370859, 1e-15);
    EXPECT_GT(std_normal_interval(38.0, 39.0), 0.0);
}

TEST(Normal, QuantileRejectsOutsideUnitInterval) {
    EXPECT_THROW(std_normal_quantile(0.0), Error);
    EXPECT_THROW(std_normal_quantile(1.0), Error);
    EXPECT_THROW(two_sided_critical_value(1.5), Error);
}

TEST(FoldedNormal, DensityAnchors) {
    EXPECT_NEAR(folded_normal_pdf(0.0, 0.0), 0.7978845608028654, 1e-14);
    EXPECT_NEAR(folded_normal_pdf(1.0, 0.0), 0.48394144903828673, 1e-14);
    // phi(t - mu) + phi(t + mu) at t = 1, mu = 2
    const double expect = std_normal_pdf(-1.0) + std_normal_pdf(3.0);
    EXPECT_NEAR(folded_normal_pdf(1.0, 2.0), expect, 1e-15);
    EXPECT_THROW(folded_normal_pdf(-0.5, 1.0), Error);
}

TEST(FoldedNormal, LargeArgumentsDoNotOverflow) {
    const double v = folded_normal_pdf(40.0, 40.0);
    EXPECT_NEAR(v, std_normal_pdf(0.0), 1e-15);
    EXPECT_TRUE(std::isfinite(folded_normal_kernel(50.0, 60.0)));
}

TEST(FoldedNormal, MassAndCdf) {
    EXPECT_NEAR(folded_normal_cdf(1.959963984540054, 0.0), 0.95, 1e-14);
    EXPECT_NEAR(folded_normal_mass(0.0, INFINITY, 3.0), 1.0, 1e-15);
    const double m = folded_normal_mass(0.5, 1.5, 1.0);
    const double oracle = std_normal_interval(-0.5, 0.5) + std_normal_interval(1.5, 2.5);
    EXPECT_NEAR(m, oracle, 1e-15);
}

TEST(OrderedAbsT, JointDensityAtOrigin) {
    EXPECT_NEAR(ordered_abs_pdf2(OrderedAbsT{0.0, 0.0}, Noncentrality{0.0, 0.0}), 4.0 / std::numbers::pi, 1e-13);
    // 3! (2 phi(0))^3
    EXPECT_NEAR(ordered_abs_pdf_k(OrderedAbsT{0.0, 0.0, 0.0}, Noncentrality{0.0, 0.0, 0.0}), 3.0476945248435667, 1e-12);
}

TEST(OrderedAbsT, PermutationSumMatchesPairFormula) {
    const OrderedAbsT t{0.7, 1.9};
    const Noncentrality mu{0.4, 2.2};
    const double pair = folded_normal_pdf(0.7, 0.4) * folded_normal_pdf(1.9, 2.2) +
                        folded_normal_pdf(0.7, 2.2) * folded_normal_pdf(1.9, 0.4);
    EXPECT_NEAR(ordered_abs_pdf2(t, mu), pair, 1e-15);
    EXPECT_NEAR(ordered_abs_pdf_k(t, mu), pair, 1e-15);
}

TEST(OrderedAbsT, ConstructorsValidate) {
    EXPECT_THROW(OrderedAbsT({2.0, 1.0}), Error);
    EXPECT_THROW(Noncentrality({-1.0, 0.0}), Error);
    const double raw[] = {-2.0, 0.5};
    const auto t = OrderedAbsT::from_unordered(raw);
    EXPECT_EQ(t[0], 0.5);
    EXPECT_EQ(t[1], 2.0);
}

TEST(OrderedAbsT, InnerIntegralClosedForm) {
    // 2 * P(|Z| < 1) * 2 phi(1)
    EXPECT_NEAR(inner_integral(1.0, 1.0, Noncentrality{0.0, 0.0}), 0.6607634841360668, 1e-13);
    const Noncentrality mu{0.3, 1.7};
    const auto r = integrate([&](double t1) { return ordered_abs_pdf2(OrderedAbsT{t1, 1.2}, mu); }, 0.0, 0.8, {},
                             {1e-13, 0.0, 4000});
    EXPECT_NEAR(inner_integral(0.8, 1.2, mu), r.value, 1e-12);
}

TEST(Quadrature, PolynomialIsExact) {
    const auto r = gauss_kronrod15([](double x) { return std::pow(x, 20); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 1.0 / 21.0, 1e-15);
}

TEST(Quadrature, AdaptiveHandlesKinksWithBreakpoints) {
    const double bp[] = {1.0 / 3.0};
    const auto r = integrate([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, bp, {1e-13, 0.0, 4000});
    EXPECT_NEAR(r.value, (1.0 / 9.0 + 4.0 / 9.0) / 2.0, 1e-14);
    const auto g = integrate([](double x) { return std::exp(-x * x / 2.0); }, 0.0, 12.0, {}, {1e-12, 0.0, 4000});
    EXPECT_NEAR(g.value, std::sqrt(std::numbers::pi / 2.0), 1e-12);
    EXPECT_LE(g.error, 1e-12);
}

TEST(Quadrature, ReportsAccuracyFailure) {
    EXPECT_THROW(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, {1e-15, 0.0, 8}),
                 AccuracyFailure);
}
