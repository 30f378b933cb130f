#include "supplab/bitstring.hpp"
#include "supplab/errors.hpp"

#include <bit>

namespace supplab {

BitString::BitString(std::uint32_t length) : length_(length), words_((length + 63) / 64, 0) {}

BitString BitString::from_string(std::string_view text) {
    BitString s(static_cast<std::uint32_t>(text.size()));
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c != '0' && c != '1') throw ParameterRange("BitString::from_string: character is not 0 or 1");
        if (c == '1') s.set_bit(static_cast<std::uint32_t>(i), 1);
    }
    return s;
}

BitString BitString::from_indicator(const std::vector<std::uint32_t>& coords_1based, std::uint32_t length) {
    BitString s(length);
    for (std::uint32_t j : coords_1based) {
        if (j < 1 || j > length) throw ParameterRange("BitString::from_indicator: coordinate out of range");
        s.set_bit(j - 1, 1);
    }
    return s;
}

BitString BitString::ones(std::uint32_t length) {
    BitString s(length);
    for (std::uint32_t i = 0; i < length; ++i) s.set_bit(i, 1);
    return s;
}

int BitString::bit(std::uint32_t pos) const {
    if (pos >= length_) throw ParameterRange("BitString::bit: position out of range");
    return static_cast<int>((words_[pos >> 6] >> (pos & 63)) & 1u);
}

void BitString::set_bit(std::uint32_t pos, int value) {
    if (pos >= length_) throw ParameterRange("BitString::set_bit: position out of range");
    std::uint64_t mask = std::uint64_t{1} << (pos & 63);
    if (value)
        words_[pos >> 6] |= mask;
    else
        words_[pos >> 6] &= ~mask;
}

std::uint32_t BitString::count_ones() const {
    std::uint32_t total = 0;
    for (std::uint64_t w : words_) total += static_cast<std::uint32_t>(std::popcount(w));
    return total;
}

std::uint32_t BitString::hamming(const BitString& other) const {
    if (length_ != other.length_) throw ParameterRange("BitString::hamming: length mismatch");
    std::uint32_t total = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
        total += static_cast<std::uint32_t>(std::popcount(words_[i] ^ other.words_[i]));
    return total;
}

BitString BitString::repeat(std::uint32_t times) const {
    if (times == 0) throw ParameterRange("BitString::repeat: times must be positive");
    BitString out(length_ * times);
    for (std::uint32_t copy = 0; copy < times; ++copy)
        for (std::uint32_t i = 0; i < length_; ++i)
            if (bit(i)) out.set_bit(copy * length_ + i, 1);
    return out;
}

std::string BitString::to_string() const {
    std::string s(length_, '0');
    for (std::uint32_t i = 0; i < length_; ++i)
        if (bit(i)) s[i] = '1';
    return s;
}

bool BitString::operator<(const BitString& other) const {
    if (length_ != other.length_) return length_ < other.length_;
    for (std::uint32_t i = 0; i < length_; ++i) {
        int a = bit(i), b = other.bit(i);
        if (a != b) return a < b;
    }
    return false;
}

std::size_t BitStringHash::operator()(const BitString& s) const {
    std::uint64_t h = 0xcbf29ce484222325ull ^ s.size();
    for (std::uint64_t w : s.words()) {
        h ^= w;
        h *= 0x100000001b3ull;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

} // namespace supplab
