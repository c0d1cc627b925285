#pragma once

#include <cstdint>
#include <limits>

namespace lapi {

/**
 * Seeded, splittable random stream.
 *
 * The state is a SplitMix64 counter. `derive(tag)` hashes (key, tag) into the
 * key of an independent child stream, so a tuple such as
 * (seed, iteration, anchor, trajectory) names a reproducible substream no
 * matter in which order or on which thread the draws happen.
 *
 * Satisfies UniformRandomBitGenerator so it can feed <random> distributions,
 * but the library itself only uses `uniform()` to stay bit-portable.
 */
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed = 0) noexcept;

    RandomStream derive(std::uint64_t tag) const noexcept;

    std::uint64_t next() noexcept;
    result_type operator()() noexcept { return next(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) (n > 0), rejection sampled.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t key() const noexcept { return key_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace lapi
