#pragma once

#include <cstdint>
#include <string_view>

namespace supplab {

/// Identifies the generator construction; bump when the stream layout changes.
inline constexpr std::string_view kRngName = "philox4x32-10/v1";

/// One independent stream of a counter-based generator (Philox 4x32, 10
/// rounds). A stream is addressed by (seed, label, index); draws only advance
/// a local counter, so streams never interfere and any draw can be replayed
/// from its address alone.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform in [0,1) with 53 random bits.
    double next_double();
    /// Unbiased uniform draw from {0, 1, ..., bound-1}; bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform 1-based coordinate in {1, ..., n}.
    std::uint32_t coordinate(std::uint32_t n) { return static_cast<std::uint32_t>(below(n)) + 1; }
    int bit() { return static_cast<int>(next_u64() & 1u); }
    /// True with probability threshold / 2^64.
    bool below_threshold(std::uint64_t threshold) { return next_u64() < threshold; }

private:
    std::uint32_t key_[2];
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

/// Root of a seed's stream tree.
class SeedTree {
public:
    explicit SeedTree(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t seed() const { return seed_; }
    RngStream stream(std::string_view label, std::uint64_t index = 0) const {
        return RngStream(seed_, label, index);
    }

private:
    std::uint64_t seed_;
};

/// Stable 64-bit mix used for deriving per-row seeds from structured keys.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

} // namespace supplab
