#include "supplab/rng.hpp"
#include "supplab/errors.hpp"

#include <array>
#include <limits>

namespace supplab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr, std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return splitmix(splitmix(a) ^ b); }

RngStream::RngStream(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    std::uint64_t key = splitmix(seed ^ splitmix(fnv1a(label)));
    key_[0] = static_cast<std::uint32_t>(key);
    key_[1] = static_cast<std::uint32_t>(key >> 32);
    stream_ = index;
}

std::uint64_t RngStream::next_u64() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32),
    };
    ++counter_;
    auto out = philox_block(ctr, key_[0], key_[1]);
    spare_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    have_spare_ = true;
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t bound) {
    if (bound == 0) throw ParameterRange("RngStream::below: bound must be positive");
    // Rejection sampling over the largest multiple of bound.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        std::uint64_t draw = next_u64();
        if (draw < limit || limit == 0) return draw % bound;
    }
}

} // namespace supplab
