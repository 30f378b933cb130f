#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace supplab {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational. All probability weights and distances are
/// carried in this type so that small-scale checks can compare exactly.
using Rat = boost::rational<BigInt>;

inline Rat rat(long long num, long long den = 1) { return Rat(BigInt(num), BigInt(den)); }

double rat_to_double(const Rat& r);

/// Exact conversion; every finite double is a dyadic rational.
Rat rat_from_double(double value);

/// Parses "p/q", a decimal string ("0.25", "3"), or scientific-free integers.
/// Decimal strings convert exactly (finite decimals are rationals).
Rat parse_rational(std::string_view text);

/// Canonical form: "p" when the denominator is 1, otherwise "p/q".
std::string format_rational(const Rat& r);

/// Floor of log2(1/r) for r in (0,1]; ParameterRange outside that domain.
int floor_log2_inverse(const Rat& r);

/// Smallest L with 2^L >= 1/r, for r in (0,1].
int ceil_log2_inverse(const Rat& r);

/// Exact ceil(a/b) for positive BigInt b.
BigInt ceil_div(const BigInt& a, const BigInt& b);

/// Exact ceiling of a nonnegative rational as an unsigned 64-bit count.
std::uint64_t ceil_to_u64(const Rat& r);

/// Exact ceil(r * log2(value)) for r >= 0, value >= 1. Closed form when r is
/// zero or value is a power of two; every other case is irrational and is
/// resolved at 100-digit precision with a guard against landing within 1e-60
/// of an integer.
std::uint64_t ceil_rat_mul_log2(const Rat& r, std::uint64_t value);

/// Exact ceil(r * ln(value)) for r >= 0, value >= 1. ln(value) is
/// transcendental for value >= 2, so apart from the r = 0 and value = 1 cases
/// the same guarded high-precision route decides the ceiling.
std::uint64_t ceil_rat_mul_ln(const Rat& r, std::uint64_t value);

} // namespace supplab
