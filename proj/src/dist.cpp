#include "medtest/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "medtest/error.hpp"
#include "medtest/normal.hpp"

namespace medtest {

namespace {

void require_ordered_nonnegative(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || v[i] < 0.0) {
            throw Error(ErrorCode::domain_error,
                        std::string(what) + " entries must be finite and non-negative");
        }
        if (i > 0 && v[i] < v[i - 1]) {
            throw Error(ErrorCode::domain_error,
                        std::string(what) + " must be sorted non-decreasing");
        }
    }
}

std::vector<double> abs_sorted(std::span<const double> x) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::abs(v); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Noncentrality::Noncentrality(std::vector<double> values) : values_(std::move(values)) {
    require_ordered_nonnegative(values_, "noncentrality");
}

Noncentrality Noncentrality::from_unordered(std::span<const double> mu) {
    return Noncentrality(abs_sorted(mu));
}

OrderedAbsT::OrderedAbsT(std::vector<double> values) : values_(std::move(values)) {
    require_ordered_nonnegative(values_, "ordered absolute t");
}

OrderedAbsT OrderedAbsT::from_unordered(std::span<const double> t) {
    return OrderedAbsT(abs_sorted(t));
}

double folded_normal_kernel(double t, double mu) noexcept {
    const double x = mu * t;
    if (x > 30.0) {
        const double dm = t - mu;
        const double dp = t + mu;
        return 0.5 * kSqrt2OverPi * (std::exp(-0.5 * dm * dm) + std::exp(-0.5 * dp * dp));
    }
    return kSqrt2OverPi * std::exp(-0.5 * (t * t + mu * mu)) * std::cosh(x);
}

double folded_normal_pdf(double t, double mu) {
    if (!(t >= 0.0) || !(mu >= 0.0)) {
        throw Error(ErrorCode::domain_error, "folded_normal_pdf requires t >= 0 and mu >= 0");
    }
    return folded_normal_kernel(t, mu);
}

double folded_normal_mass(double lo, double hi, double mu) noexcept {
    if (hi <= lo) return 0.0;
    return std_normal_interval(lo - mu, hi - mu) + std_normal_interval(lo + mu, hi + mu);
}

double folded_normal_cdf(double b, double mu) noexcept {
    return folded_normal_mass(0.0, b, mu);
}

double ordered_abs_pdf2(const OrderedAbsT& t, const Noncentrality& mu) {
    if (t.size() != 2 || mu.size() != 2) {
        throw Error(ErrorCode::domain_error, "ordered_abs_pdf2 needs K = 2");
    }
    const double t1 = t[0], t2 = t[1], m1 = mu[0], m2 = mu[1];
    // Each product of cosh terms equals the product of two folded-normal
    // kernels divided by 2/pi; use the kernels so large arguments cannot overflow.
    return folded_normal_kernel(t1, m1) * folded_normal_kernel(t2, m2) +
           folded_normal_kernel(t2, m1) * folded_normal_kernel(t1, m2);
}

double ordered_abs_pdf_k(const OrderedAbsT& t, const Noncentrality& mu) {
    const std::size_t k = t.size();
    if (k == 0 || mu.size() != k) {
        throw Error(ErrorCode::domain_error, "t and mu must have the same positive length");
    }
    if (k > kMaxPermanentDimension) {
        throw Error(ErrorCode::unsupported_dimension,
                    "permanent enumeration is limited to K <= 6, got K = " + std::to_string(k));
    }
    std::vector<double> chi(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) chi[i * k + j] = folded_normal_kernel(t[i], mu[j]);
    }
    std::vector<std::size_t> sigma(k);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    double perm = 0.0;
    do {
        double prod = 1.0;
        for (std::size_t i = 0; i < k; ++i) prod *= chi[i * k + sigma[i]];
        perm += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return perm;
}

double inner_integral(double b, double t2, const Noncentrality& mu) {
    if (!(b >= 0.0) || !(t2 >= 0.0)) {
        throw Error(ErrorCode::domain_error, "inner_integral requires b >= 0 and t2 >= 0");
    }
    if (mu.size() != 2) throw Error(ErrorCode::domain_error, "inner_integral needs K = 2");
    const double m1 = mu[0], m2 = mu[1];
    return folded_normal_kernel(t2, m2) * folded_normal_cdf(b, m1) +
           folded_normal_kernel(t2, m1) * folded_normal_cdf(b, m2);
}

}  // namespace medtest
