#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace moran {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the output depends only
/// on (counter, key), which is what makes per-trajectory streams order-independent.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Seed of trajectory `index` in a batch rooted at `base_seed`.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/// Counter-based random stream. Key = seed, counter = (block, substream).
/// Distinct substreams of the same seed never overlap.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed, std::uint64_t substream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t seed() const { return seed_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t substream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

} // namespace moran
