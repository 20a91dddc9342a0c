#include "medtest/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "medtest/error.hpp"

namespace medtest {

namespace {

// Kronrod abscissae on [-1, 1] (non-negative half); odd indices are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
    const Panel p = panel(f, a, b);
    return {p.value, p.error, 15, 1};
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureOptions& options) {
    QuadratureResult result;
    if (b <= a) return result;

    std::vector<double> cuts{a};
    for (double x : breakpoints) {
        if (x > a && x < b) cuts.push_back(x);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel> heap;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = panel(f, cuts[i], cuts[i + 1]);
        total += p.value;
        total_error += p.error;
        heap.push(p);
        result.evaluations += 15;
    }

    auto tolerance = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };
    while (total_error > tolerance()) {
        if (heap.size() >= options.max_intervals) break;
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Panels narrower than a few ulps cannot be refined further.
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64 * std::numeric_limits<double>::epsilon() *
                                      std::max(1.0, std::abs(mid))) {
            break;
        }
        heap.pop();
        const Panel left = panel(f, worst.a, mid);
        const Panel right = panel(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from scratch so the running update does not accumulate drift.
    total = 0.0;
    total_error = 0.0;
    result.intervals = heap.size();
    while (!heap.empty()) {
        total += heap.top().value;
        total_error += heap.top().error;
        heap.pop();
    }
    result.value = total;
    result.error = total_error;
    if (!std::isfinite(total) || total_error > tolerance()) {
        std::ostringstream msg;
        msg << "adaptive quadrature on [" << a << ", " << b << "] did not reach tolerance "
            << tolerance() << " (achieved " << total_error << ")";
        throw AccuracyFailure(msg.str(), total, total_error);
    }
    return result;
}

}  // namespace medtest
