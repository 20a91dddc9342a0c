#include "medtest/monte_carlo.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "medtest/error.hpp"
#include "medtest/parallel.hpp"

namespace medtest {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in (0, 1).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

constexpr std::uint64_t kChunk = 1 << 16;

}  // namespace

Philox4x32::Block Philox4x32::operator()(std::uint64_t hi, std::uint64_t lo) const noexcept {
    Block ctr = {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                 static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

std::array<double, 2> Philox4x32::normal_pair(std::uint64_t hi, std::uint64_t lo) const noexcept {
    const Block b = (*this)(hi, lo);
    const double u1 = to_unit(b[0], b[1]);
    const double u2 = to_unit(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(angle), r * std::sin(angle)};
}

MCEstimate monte_carlo_rp(const DecisionRule& rule, std::span<const double> mu,
                          std::uint64_t draws, std::uint64_t seed, std::size_t threads) {
    if (draws < 10000) throw Error(ErrorCode::domain_error, "Monte Carlo needs at least 1e4 draws");
    if (mu.empty()) throw Error(ErrorCode::domain_error, "Monte Carlo needs a non-empty mean vector");
    const std::size_t k = mu.size();
    const std::size_t pairs = (k + 1) / 2;
    const Philox4x32 gen(seed);

    // Fixed chunking keeps the per-chunk counts, and so the result, independent
    // of how chunks are assigned to threads.
    const std::uint64_t chunks = (draws + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> counts(chunks, 0);
    parallel_for(
        chunks,
        [&](std::size_t c) {
            std::vector<double> t(2 * pairs);
            const std::uint64_t begin = c * kChunk;
            const std::uint64_t end = std::min<std::uint64_t>(draws, begin + kChunk);
            std::uint64_t hits = 0;
            for (std::uint64_t i = begin; i < end; ++i) {
                for (std::size_t p = 0; p < pairs; ++p) {
                    const auto z = gen.normal_pair(i, p);
                    t[2 * p] = z[0];
                    t[2 * p + 1] = z[1];
                }
                for (std::size_t j = 0; j < k; ++j) t[j] += mu[j];
                if (rule(std::span<const double>(t.data(), k))) ++hits;
            }
            counts[c] = hits;
        },
        threads);

    MCEstimate out;
    out.draws = draws;
    for (std::uint64_t c : counts) out.rejections += c;
    out.estimate = static_cast<double>(out.rejections) / static_cast<double>(draws);
    out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(draws));
    return out;
}

}  // namespace medtest
