// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "medtest/boundary.hpp"
#include "medtest/envelope.hpp"
#include "medtest/mediation.hpp"
#include "medtest/monte_carlo.hpp"
#include "medtest/normal.hpp"
#include "medtest/optimize.hpp"
#include "medtest/parallel.hpp"
#include "medtest/rp.hpp"

using namespace medtest;

namespace {

// g(t) at t = row/10 + column/100, as printed.
const char* const kTable[22][10] = {
    {"0", "0.01", "0.02", "0.03", "0.04", "0.05", "0.06", "0.07", "0.08", "0.09"},
    {"0.1", "0.10672", "0.10672", "0.10672", "0.10672", "0.10672", "0.11672", "0.12671", "0.13670", "0.14669"},
    {"0.15669", "0.16668", "0.17667", "0.18666", "0.19666", "0.20665", "0.21664", "0.22663", "0.23663", "0.24662"},
    {"0.25661", "0.26660", "0.27660", "0.28659", "0.29658", "0.30658", "0.31657", "0.32656", "0.33655", "0.34655"},
    {"0.35654", "0.36653", "0.37652", "0.38652", "0.39651", "0.40650", "0.41649", "0.42649", "0.43648", "0.44647"},
    {"0.45646", "0.46646", "0.47645", "0.48644", "0.49643", "0.50643", "0.51642", "0.52641", "0.53640", "0.54640"},
    {"0.55639", "0.56638", "0.57637", "0.58637", "0.59636", "0.60635", "0.61634", "0.62634", "0.63633", "0.64632"},
    {"0.65631", "0.66631", "0.67630", "0.68629", "0.69628", "0.70628", "0.71627", "0.72626", "0.73625", "0.74625"},
    {"0.75624", "0.76623", "0.77622", "0.78622", "0.79621", "0.80620", "0.81620", "0.82619", "0.83618", "0.84617"},
    {"0.85617", "0.86616", "0.87615", "0.88614", "0.89614", "0.90613", "0.91612", "0.92611", "0.93611", "0.94610"},
    {"0.95609", "0.96608", "0.97608", "0.98607", "0.99606", "1.00605", "1.01605", "1.02604", "1.03603", "1.04602"},
    {"1.05602", "1.06601", "1.07600", "1.08599", "1.09599", "1.10598", "1.11597", "1.12596", "1.13596", "1.14595"},
    {"1.15594", "1.16593", "1.17593", "1.18592", "1.19591", "1.20590", "1.21590", "1.22589", "1.23588", "1.24587"},
    {"1.25587", "1.26586", "1.27585", "1.28584", "1.29584", "1.30583", "1.31286", "1.31310", "1.31310", "1.31310"},
    {"1.31310", "1.31310", "1.31310", "1.31310", "1.31310", "1.31750", "1.32750", "1.33750", "1.34750", "1.35750"},
    {"1.36750", "1.37750", "1.38750", "1.39750", "1.40750", "1.41750", "1.42750", "1.43750", "1.44750", "1.45750"},
    {"1.46750", "1.47750", "1.48750", "1.49750", "1.50750", "1.51750", "1.52750", "1.53750", "1.54750", "1.55750"},
    {"1.56750", "1.57750", "1.58750", "1.59750", "1.60750", "1.61750", "1.62750", "1.63750", "1.64750", "1.65750"},
    {"1.66750", "1.67750", "1.68750", "1.69750", "1.70750", "1.71750", "1.72750", "1.73750", "1.74750", "1.75750"},
    {"1.76750", "1.77750", "1.78750", "1.79750", "1.80750", "1.81750", "1.82750", "1.83750", "1.84750", "1.85750"},
    {"1.86750", "1.87750", "1.88750", "1.89750", "1.90750", "1.91750", "1.92750", "1.93750", "1.94750", "1.95750"},
    {"1.95996", "1.95996", "1.95996", "1.95996", "1.95996", "1.95996", "1.95996", "1.95996", "1.95996", "1.95996"},
};

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* arg, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, arg, a, b, c);
    return buf;
}

std::vector<double> range(double lo, double step, double hi) {
    std::vector<double> v;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long k = 0; k <= n; ++k) v.push_back(lo + step * static_cast<double>(k));
    return v;
}

Outcome table_reproduction() {
    const auto start = Clock::now();
    const auto& g = published_optimal_boundary();
    Outcome o;
    double worst = 0.0;
    int mismatches = 0;
    for (int r = 0; r < 22; ++r) {
        for (int c = 0; c < 10; ++c) {
            const std::string printed = kTable[r][c];
            const auto dot = printed.find('.');
            const int decimals = dot == std::string::npos ? 0 : static_cast<int>(printed.size() - dot - 1);
            const double half_ulp = 0.5 * std::pow(10.0, -decimals);
            const double diff = std::abs(g.eval((10 * r + c) / 100.0) - std::stod(printed));
            worst = std::max(worst, diff / half_ulp);
            if (diff > half_ulp + 1e-12) ++mismatches;
        }
    }
    const double elapsed = seconds_since(start);
    o.pass = mismatches == 0 && elapsed < 1.0;
    o.detail = fmt("220 entries, %.0f mismatches, worst |diff| = %.3f of half a printed unit, %.3f s", mismatches, worst,
                   elapsed);
    return o;
}

Outcome published_near_similar() {
    const auto start = Clock::now();
    const auto grid = range(0.0, 0.1, 7.5);
    const RPGrid r = nrp_curve(published_optimal_boundary(), grid, 1e-8);
    const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
    const double elapsed = seconds_since(start);
    Outcome o;
    o.pass = *lo >= 0.05 - 1.5e-5 && *hi <= 0.05 + 1e-8 && elapsed < 30.0;
    o.detail = fmt("%.0f points, NRP in [%.9f, %.9f]", static_cast<double>(grid.size()), *lo, *hi) +
               fmt(", %.2f s", elapsed);
    return o;
}

Outcome exact_similar() {
    Outcome o;
    double worst_nrp = 0.0, worst_f = 0.0;
    for (double alpha : {0.05, 0.10, 0.25}) {
        const StepBoundary b = exact_similar_boundary(alpha);
        const RPGrid r = nrp_curve(b, range(0.0, 0.25, 8.0), 1e-10);
        for (double v : r.values) worst_nrp = std::max(worst_nrp, std::abs(v - alpha));
        for (int k = 0; k <= 6000; ++k) {
            const double t = k / 1000.0;
            const double inv = b.generalized_inverse(t);
            const double upper = std::isinf(inv) ? 1.0 : std_normal_cdf(inv);
            worst_f = std::max(worst_f, std::abs(upper - std_normal_cdf(b.eval(t)) - alpha / 2.0));
        }
    }
    o.pass = worst_nrp <= 1e-7 && worst_f <= 1e-10;
    o.detail = fmt("alpha in {0.05, 0.10, 0.25}: max |NRP - alpha| = %.2e, max |F(t)| = %.2e", worst_nrp, worst_f);
    return o;
}

Outcome classic_anchors() {
    Outcome o;
    const double z = two_sided_critical_value(0.05);
    const double analytic = std::pow(2.0 * (1.0 - std_normal_cdf(z)), 2);
    const double lr = rejection_prob(lr_boundary(0.05), Noncentrality{0.0, 0.0}, 1e-10).value;
    const double c = z * z;
    const double chi2_tail = 2.0 * std_normal_sf(std::sqrt(15.366));
    const std::vector<double> origin{0.0, 0.0};
    const auto mc = monte_carlo_rp([c](std::span<const double> t) { return wald_rejects(t[0], t[1], c); }, origin,
                                   10000000, 20240601);
    const double rel = std::abs(mc.estimate - chi2_tail) / chi2_tail;
    o.pass = std::abs(lr - analytic) <= 1e-9 && rel <= 0.10;
    o.detail = fmt("LR NRP(0,0) = %.12f vs %.12f; ", lr, analytic) +
               fmt("Wald MC %.4e vs P[chi2_1 > 15.366] = %.4e (rel %.3f)", mc.estimate, chi2_tail, rel);
    return o;
}

Outcome power_ordering() {
    Outcome o;
    const double z = two_sided_critical_value(0.05);
    std::string detail;
    double gain = 0.0;
    for (double m : {0.1, 0.5, 1.0, 2.0, 3.0}) {
        const Noncentrality mu{m, m};
        const double w = wald_rejection_prob(z * z, mu).value;
        const double lr = rejection_prob(lr_boundary(), mu).value;
        const double g = rejection_prob(published_optimal_boundary(), mu).value;
        if (!(w <= lr + 1e-9 && lr <= g + 1e-9)) o.pass = false;
        if (m == 0.1) gain = g - lr;
        detail += fmt("mu=%.1f: W %.4f LR %.4f", m, w, lr) + fmt(" g %.4f; ", g);
    }
    if (gain < 0.045) o.pass = false;
    o.detail = detail + fmt("gain at 0.1 = %.4f", gain);
    return o;
}

Outcome envelope_check() {
    const auto start = Clock::now();
    EnvelopeProblem p;
    p.t_max = 6.0;
    p.cell_size = 0.05;
    p.null_points = null_grid(20, 6.0);
    p.epsilon = 1e-5;
    const std::vector<Noncentrality> alts{{0.2, 0.2}, {0.5, 0.5}, {1.0, 1.0}, {0.5, 1.5}, {1.0, 2.0},
                                          {1.5, 1.5}, {2.0, 2.0}, {1.0, 3.0}, {2.0, 3.0}, {4.0, 4.0}};
    const EnvelopeSurface s = power_envelope(alts, p);
    const RPGrid g = rp_grid(published_optimal_boundary(), alts);
    Outcome o;
    double min_margin = 1.0, max_gap = 0.0;
    for (std::size_t i = 0; i < alts.size(); ++i) {
        const double gap = s.relaxed.values[i] - g.values[i];
        min_margin = std::min(min_margin, gap);
        max_gap = std::max(max_gap, gap);
    }
    EnvelopeProblem q = p;
    q.alt_point = Noncentrality{2.0, 3.0};
    q.nonsimilar = true;
    const double nonsimilar = point_optimal_cr(q).relaxed_power;
    const double similar = s.relaxed.values[8];
    const double excess = nonsimilar - similar;
    o.pass = min_margin >= -1e-6 && max_gap <= 0.02 && excess >= -1e-9 && excess <= 0.025;
    o.detail = fmt("min(envelope - g) = %.2e, max gap = %.5f, ", min_margin, max_gap) +
               fmt("nonsimilar - similar at (2,3) = %.5f (power %.3f), %.0f s", excess, similar, seconds_since(start));
    return o;
}

Outcome three_dimensional() {
    const auto grid = range(0.0, 0.02, 6.0);
    std::vector<double> weighted(grid.size()), naive(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Noncentrality mu{0.0, 0.0, grid[i]};
        weighted[i] = rejection_prob_3d(mu, 1e-9, Rule3D::weighted).value;
        naive[i] = rejection_prob_3d(mu, 1e-9, Rule3D::naive).value;
    });
    const auto [lo, hi] = std::minmax_element(weighted.begin(), weighted.end());
    const double naive_max = *std::max_element(naive.begin(), naive.end());
    Outcome o;
    o.pass = *lo >= 0.0487 && *hi <= 0.05 + 1e-6 && std::abs(naive_max - 0.072) <= 0.002;
    o.detail = fmt("weighted NRP in [%.6f, %.6f], naive max %.5f", *lo, *hi, naive_max) +
               fmt(" over %.0f points", static_cast<double>(grid.size()));
    return o;
}

Outcome oracle_agreement() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    const std::vector<Boundary> boundaries{published_optimal_boundary(), lr_boundary(0.05), lr_boundary(0.10),
                                           exact_similar_boundary(0.05), exact_similar_boundary(0.25)};
    Outcome o;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Boundary& b = boundaries[k % boundaries.size()];
        const std::vector<double> mu{u(rng), u(rng)};
        const double q = rejection_prob(b, Noncentrality::from_unordered(mu)).value;
        const auto mc = monte_carlo_rp([&b](std::span<const double> t) { return g_rejects(t[0], t[1], b); }, mu,
                                       1000000, 1000 + k);
        const double se = std::max(mc.standard_error, 1e-7);
        worst = std::max(worst, std::abs(q - mc.estimate) / se);
    }
    o.pass = worst <= 3.5;
    o.detail = fmt("20 pairs, worst |quadrature - MC| = %.2f standard errors", worst);
    return o;
}

Outcome fixtures() {
    Outcome o;
    const bool a = g_test(2.052, -1.941).rejected() && !lr_test(2.052, -1.941).rejected();
    const bool i1 = g_test(-1.902, -1.838).rejected() && !sobel_wald_test(-1.902, -1.838).rejected();
    const bool i2 = g_test(2.709, 7.120).rejected() && sobel_wald_test(2.709, 7.120).rejected();
    const bool i3 = !g_test_3d(-1.902, -3.582, 7.120).rejected();
    o.pass = a && i1 && i2 && i3;
    o.detail = std::string("(2.052, -1.941) ") + (a ? "ok" : "wrong") + ", i1 " + (i1 ? "ok" : "wrong") + ", i2 " +
               (i2 ? "ok" : "wrong") + ", i3 " + (i3 ? "ok" : "wrong");
    return o;
}

Outcome basic_varying() {
    const auto start = Clock::now();
    OptimizeConfig c;
    c.knots = 16;
    c.null_grid = default_null_grid();
    const OptimizeResult r = basic_varying_g(c);
    const RPGrid check = nrp_curve(r.boundary, c.null_grid, 1e-10);
    const auto [lo, hi] = std::minmax_element(check.values.begin(), check.values.end());
    const double elapsed = seconds_since(start);
    Outcome o;
    o.pass = *lo >= 0.0499 && *hi <= 0.05 + 1e-8 && elapsed <= 600.0;
    o.detail = fmt("J=16: NRP in [%.9f, %.12f], %.0f s", *lo, *hi, elapsed);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"table reproduction", table_reproduction},
        {"published boundary near-similar", published_near_similar},
        {"exact similar test", exact_similar},
        {"classic-test anchors", classic_anchors},
        {"power ordering and gain", power_ordering},
        {"power envelope", envelope_check},
        {"three-dimensional rule", three_dimensional},
        {"quadrature vs Monte Carlo", oracle_agreement},
        {"empirical fixtures", fixtures},
        {"basic varying-g", basic_varying},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
