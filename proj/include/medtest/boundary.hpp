#pragma once

// Boundary functions g of the critical region {|t|_(1) > g(|t|_(2))}.

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace medtest {

struct Knot {
    double t;
    double g;
    bool operator==(const Knot&) const = default;
};

/// Piecewise-linear boundary through `knots`, constant `tail` from the last
/// knot abscissa onwards. Invariants (checked on construction):
///   first knot is (0, 0), abscissae strictly increasing, ordinates
///   non-decreasing with g <= t, tail >= last ordinate, and
///   tail == Phi^{-1}(1 - alpha/2).
class GBoundary {
public:
    GBoundary(std::vector<Knot> knots, double tail, double alpha = 0.05);

    double eval(double t) const noexcept;
    const std::vector<Knot>& knots() const noexcept { return knots_; }
    double tail() const noexcept { return tail_; }
    double alpha() const noexcept { return alpha_; }

    bool operator==(const GBoundary&) const = default;

private:
    std::vector<Knot> knots_;
    double tail_;
    double alpha_;
};

/// Right-continuous step function g(t) = c_j for c_j <= t < c_{j+1}, with
/// c_0 = 0 and c_j = Phi^{-1}(1/2 + j alpha/2) for j = 1 .. R-1, R = 1/alpha.
class StepBoundary {
public:
    StepBoundary(std::vector<double> steps, double alpha);

    double eval(double t) const noexcept;
    /// inf{x : g(x) > t}; +infinity once t reaches the last step.
    double generalized_inverse(double t) const;

    const std::vector<double>& steps() const noexcept { return steps_; }
    double alpha() const noexcept { return alpha_; }

    bool operator==(const StepBoundary&) const = default;

private:
    std::vector<double> steps_;
    double alpha_;
};

using Boundary = std::variant<GBoundary, StepBoundary>;

double eval(const Boundary& boundary, double t) noexcept;
double level(const Boundary& boundary) noexcept;
/// Abscissae where g has a kink or jump.
std::vector<double> kinks(const Boundary& boundary);

/// The optimal boundary shipped with the test (17 knots).
const GBoundary& published_optimal_boundary();

/// Likelihood-ratio boundary min(t, z_{alpha/2}).
GBoundary lr_boundary(double alpha = 0.05);

/// Unique exact similar boundary. Throws no_similar_test_exists unless 1/alpha
/// is an integer (relative tolerance 1e-9).
StepBoundary exact_similar_boundary(double alpha);

double generalized_inverse(const StepBoundary& boundary, double t);

// Boundary files: JSON object with `alpha`, `kind` ("linear" | "step"),
// `knots` ([[t, g], ...]) and `tail`; doubles are written round-trip exact.
std::string serialize(const Boundary& boundary);
Boundary deserialize(std::string_view text);
void save_boundary(const Boundary& boundary, const std::filesystem::path& path);
Boundary load_boundary(const std::filesystem::path& path);

}  // namespace medtest
