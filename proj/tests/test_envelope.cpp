#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "medtest/dist.hpp"
#include "medtest/envelope.hpp"
#include "medtest/quadrature.hpp"

using namespace medtest;

namespace {

EnvelopeProblem small_problem() {
    EnvelopeProblem p;
    p.t_max = 4.0;
    p.cell_size = 0.25;
    p.null_points = null_grid(8, 4.0);
    p.alt_point = Noncentrality{1.0, 2.0};
    return p;
}

// Cell mass by integrating the ordered density's closed-form inner integral over t2.
double cell_mass(const Cell& c, const Noncentrality& mu) {
    const double hi = std::isinf(c.t2_hi) ? c.t2_lo + 15.0 : c.t2_hi;
    auto f = [&](double t2) {
        const double top = c.i == c.j ? t2 : c.t1_hi;
        return inner_integral(top, t2, mu) - inner_integral(c.t1_lo, t2, mu);
    };
    return integrate(f, c.t2_lo, hi, {}, {1e-14, 0.0, 4000}).value;
}

}  // namespace

TEST(Envelope, CellLayout) {
    const auto p = small_problem();
    EXPECT_EQ(p.bins(), 16u);
    EXPECT_EQ(p.cell_count(), 17u * 18u / 2u);
    const auto cs = cells(p);
    ASSERT_EQ(cs.size(), p.cell_count());
    for (std::size_t k = 0; k < cs.size(); ++k) {
        EXPECT_EQ(p.cell_index(cs[k].i, cs[k].j), k);
        EXPECT_LE(cs[k].i, cs[k].j);
    }
    EXPECT_TRUE(std::isinf(cs.back().t2_hi));
}

TEST(Envelope, CellProbabilitiesMatchQuadrature) {
    const auto p = small_problem();
    const auto cs = cells(p);
    for (const auto& mu : {Noncentrality{0.0, 0.0}, Noncentrality{0.7, 2.3}}) {
        const auto probs = cell_probabilities(mu, p);
        EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-12);
        for (std::size_t k : {0u, 5u, 40u, 100u, 140u, 152u}) {
            EXPECT_NEAR(probs[k], cell_mass(cs[k], mu), 1e-11) << k;
        }
    }
}

TEST(Envelope, RelaxedSolutionMeetsSizeBand) {
    auto p = small_problem();
    p.epsilon = 1e-3;
    const auto r = point_optimal_cr(p);
    const auto alt = cell_probabilities(p.alt_point, p);
    double power = 0.0;
    for (std::size_t k = 0; k < alt.size(); ++k) {
        EXPECT_GE(r.relaxed[k], -1e-12);
        EXPECT_LE(r.relaxed[k], 1.0 + 1e-12);
        power += r.relaxed[k] * alt[k];
    }
    EXPECT_NEAR(power, r.relaxed_power, 1e-9);
    for (const auto& mu : p.null_points) {
        const auto probs = cell_probabilities(mu, p);
        double size = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) size += r.relaxed[k] * probs[k];
        EXPECT_LE(size, p.alpha + 1e-9);
        EXPECT_GE(size, p.alpha - p.epsilon - 1e-9);
    }
    EXPECT_EQ(r.selection.size(), alt.size());
    EXPECT_LE(r.rounded_power, r.relaxed_power + 1e-9);
}

TEST(Envelope, NonsimilarIsAtLeastSimilar) {
    auto p = small_problem();
    p.epsilon = 1e-3;
    const double similar = point_optimal_cr(p).relaxed_power;
    p.nonsimilar = true;
    EXPECT_GE(point_optimal_cr(p).relaxed_power, similar - 1e-9);
}

TEST(Envelope, ValidatesProblem) {
    auto p = small_problem();
    p.cell_size = 0.3;
    EXPECT_THROW(p.validate(), std::exception);
    p = small_problem();
    p.null_points.clear();
    EXPECT_THROW(p.validate(), std::exception);
}

TEST(Envelope, Grids) {
    const auto alts = triangular_alt_grid(1.0, 3.0);
    EXPECT_EQ(alts.size(), 6u);
    const auto nulls = null_grid(3, 6.0);
    EXPECT_EQ(nulls[1][1], 3.0);
    EXPECT_EQ(nulls[1][0], 0.0);
}
