/**
 * @file rng.hpp
 * @brief Seeded, splittable random streams.
 *
 * A stream is named by (seed, stream_id). Identical names reproduce identical
 * draws; substream(k) derives a child name by hashing, so per-trajectory
 * streams do not depend on the order in which trajectories are generated.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lambdapi/linalg.hpp"

namespace lambdapi {

/// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    /// Child stream; distinct k give distinct, order-independent streams.
    RngStream substream(std::uint64_t k) const noexcept {
        return {seed, mix64(stream_id ^ mix64(k + 0x632be59bd9b4e019ULL))};
    }

    Engine engine() const {
        const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
        const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
        std::seed_seq seq{lo(seed), hi(seed), lo(stream_id), hi(stream_id)};
        return Engine(seq);
    }

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

/// Index drawn from probabilities `p` (assumed to sum to 1); the last
/// positive entry absorbs round-off.
inline std::size_t sample_index(Engine& eng, const Vector& p) {
    const double u = uniform01(eng);
    double acc = 0.0;
    Eigen::Index last = 0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p[k] <= 0.0) continue;
        last = k;
        acc += p[k];
        if (u < acc) return static_cast<std::size_t>(k);
    }
    return static_cast<std::size_t>(last);
}

/// Precomputed cumulative table for repeated draws from one distribution.
class CategoricalTable {
public:
    explicit CategoricalTable(const Vector& p) : cum_(static_cast<std::size_t>(p.size())) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            acc += p[k];
            cum_[static_cast<std::size_t>(k)] = acc;
        }
        // the last positive entry and everything after it close above 1
        for (std::size_t k = cum_.size(); k-- > 0;) {
            cum_[k] = 2.0;
            if (p[static_cast<Eigen::Index>(k)] > 0.0) break;
        }
    }

    std::size_t draw(Engine& eng) const {
        const double u = uniform01(eng);
        std::size_t lo = 0, hi = cum_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cum_[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

private:
    std::vector<double> cum_;
};

}  // namespace lambdapi
