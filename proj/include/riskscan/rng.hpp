#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace riskscan {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output of stream (seed, stream) is a
/// pure function of (seed, stream, i), so replicate r always sees the same
/// numbers no matter which thread runs it or in which order.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream ^ 0x5851f42d4c957f2dULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Draws `total` items into categories with the given probabilities
/// (need not be normalised) by sequential conditional binomials. The last
/// category with positive weight absorbs the remainder.
template <typename Rng>
void multinomial(std::int64_t total, std::span<const double> weights, std::span<std::int64_t> out, Rng& rng) {
    double remaining_weight = 0.0;
    for (double w : weights) {
        remaining_weight += w;
    }
    std::int64_t remaining = total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
            last_positive = i;
        }
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = 0;
        if (remaining == 0 || weights[i] <= 0.0) {
            continue;
        }
        if (i == last_positive) {
            out[i] = remaining;
            remaining = 0;
            continue;
        }
        const double p = std::min(1.0, weights[i] / remaining_weight);
        std::binomial_distribution<std::int64_t> draw(remaining, p);
        out[i] = draw(rng);
        remaining -= out[i];
        remaining_weight -= weights[i];
    }
}

}  // namespace riskscan
