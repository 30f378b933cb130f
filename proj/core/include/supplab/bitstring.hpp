#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace supplab {

/// Fixed-length bit string, word-packed. Positions are 0-based here; the
/// oracle layer speaks 1-based coordinates and converts at its boundary.
/// Character 0 of the text form is position 0.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::uint32_t length);

    static BitString from_string(std::string_view text);
    /// Indicator vector of a set of 1-based coordinates.
    static BitString from_indicator(const std::vector<std::uint32_t>& coords_1based, std::uint32_t length);
    static BitString zeros(std::uint32_t length) { return BitString(length); }
    static BitString ones(std::uint32_t length);

    std::uint32_t size() const { return length_; }
    int bit(std::uint32_t pos) const;
    void set_bit(std::uint32_t pos, int value);

    std::uint32_t count_ones() const;
    /// Number of differing positions; lengths must match.
    std::uint32_t hamming(const BitString& other) const;

    /// Concatenation of `times` copies of this string.
    BitString repeat(std::uint32_t times) const;

    std::string to_string() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const BitString& other) const {
        return length_ == other.length_ && words_ == other.words_;
    }
    bool operator!=(const BitString& other) const { return !(*this == other); }
    bool operator<(const BitString& other) const;

private:
    std::uint32_t length_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitStringHash {
    std::size_t operator()(const BitString& s) const;
};

} // namespace supplab
