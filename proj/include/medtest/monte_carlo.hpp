#pragma once

// Monte Carlo rejection probabilities: the independent check on quadrature.

#include <array>
#include <cstdint>
#include <functional>
#include <span>

namespace medtest {

/// Philox4x32-10 counter-based generator. Output block i depends only on
/// (key, counter), so any draw can be regenerated without replaying a stream.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(std::uint64_t hi, std::uint64_t lo) const noexcept;

    /// Two independent N(0, 1) variates for counter (hi, lo).
    std::array<double, 2> normal_pair(std::uint64_t hi, std::uint64_t lo) const noexcept;

private:
    std::array<std::uint32_t, 2> key_;
};

struct MCEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::uint64_t draws = 0;
    std::uint64_t rejections = 0;
};

using DecisionRule = std::function<bool(std::span<const double>)>;

/// Draws T ~ N(mu, I_K), applies `rule` to the signed t-vector and returns the
/// rejection fraction with its binomial standard error. Deterministic for a
/// given seed whatever the thread count. Throws domain_error if draws < 1e4.
MCEstimate monte_carlo_rp(const DecisionRule& rule, std::span<const double> mu,
                          std::uint64_t draws, std::uint64_t seed, std::size_t threads = 0);

}  // namespace medtest
