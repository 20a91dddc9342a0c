#pragma once

// Exact densities of ordered absolute t-statistics T ~ N(mu, I_K).

#include <cstddef>
#include <span>
#include <vector>

namespace medtest {

/// Ordered absolute noncentrality |mu|_(1) <= ... <= |mu|_(K).
class Noncentrality {
public:
    /// Validating constructor: entries must be finite, >= 0, non-decreasing.
    explicit Noncentrality(std::vector<double> values);
    Noncentrality(std::initializer_list<double> values)
        : Noncentrality(std::vector<double>(values)) {}

    /// Maximal-invariant reduction of an arbitrary mean vector: abs, then sort.
    static Noncentrality from_unordered(std::span<const double> mu);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    double max() const noexcept { return values_.empty() ? 0.0 : values_.back(); }

private:
    std::vector<double> values_;
};

/// Ordered absolute t-statistics |t|_(1) <= ... <= |t|_(K).
class OrderedAbsT {
public:
    explicit OrderedAbsT(std::vector<double> values);
    OrderedAbsT(std::initializer_list<double> values) : OrderedAbsT(std::vector<double>(values)) {}

    static OrderedAbsT from_unordered(std::span<const double> t);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

inline constexpr std::size_t kMaxPermanentDimension = 6;

/// Density of |T| for T ~ N(mu, 1) (noncentral chi, one degree of freedom).
double folded_normal_pdf(double t, double mu);

/// Unchecked kernel of folded_normal_pdf for hot loops (t, mu >= 0 assumed).
double folded_normal_kernel(double t, double mu) noexcept;

/// P(lo <= |T| <= hi) for T ~ N(mu, 1); zero when hi <= lo.
double folded_normal_mass(double lo, double hi, double mu) noexcept;

/// P(|T| <= b) = Phi(b - mu) + Phi(b + mu) - 1.
double folded_normal_cdf(double b, double mu) noexcept;

/// Joint density of (|T|_(1), |T|_(2)) for K = 2.
double ordered_abs_pdf2(const OrderedAbsT& t, const Noncentrality& mu);

/// Joint density of the K ordered absolute statistics: permanent of the matrix
/// chi(|t|_(i), |mu|_(j)). Throws unsupported_dimension for K > 6.
double ordered_abs_pdf_k(const OrderedAbsT& t, const Noncentrality& mu);

/// Closed form of the integral over t1 in [0, b] of ordered_abs_pdf2((t1, t2), mu).
double inner_integral(double b, double t2, const Noncentrality& mu);

}  // namespace medtest
