#include "supplab/rational.hpp"
#include "supplab/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace supplab {

double rat_to_double(const Rat& r) {
    return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
}

Rat rat_from_double(double value) {
    if (!std::isfinite(value)) throw ParameterRange("rat_from_double: value is not finite");
    if (value == 0.0) return Rat(0);
    int exp = 0;
    double mant = std::frexp(value, &exp); // value = mant * 2^exp, |mant| in [0.5, 1)
    // 53 doublings turn the mantissa into an integer exactly.
    auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    BigInt num(scaled);
    if (exp >= 0) {
        num <<= exp;
        return Rat(num, BigInt(1));
    }
    BigInt den(1);
    den <<= -exp;
    return Rat(num, den);
}

namespace {

bool parse_uint(std::string_view s, BigInt& out) {
    if (s.empty()) return false;
    out = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        out = out * 10 + (c - '0');
    }
    return true;
}

} // namespace

Rat parse_rational(std::string_view text) {
    if (text.empty()) throw ParameterRange("parse_rational: empty string");
    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    Rat result;
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        BigInt num, den;
        if (!parse_uint(text.substr(0, slash), num) || !parse_uint(text.substr(slash + 1), den) || den == 0)
            throw ParameterRange("parse_rational: malformed fraction '" + std::string(text) + "'");
        result = Rat(num, den);
    } else {
        auto dot = text.find('.');
        if (dot == std::string_view::npos) {
            BigInt num;
            if (!parse_uint(text, num)) throw ParameterRange("parse_rational: malformed integer '" + std::string(text) + "'");
            result = Rat(num, BigInt(1));
        } else {
            BigInt whole, frac;
            std::string_view fpart = text.substr(dot + 1);
            if (!parse_uint(text.substr(0, dot), whole) || !parse_uint(fpart, frac))
                throw ParameterRange("parse_rational: malformed decimal '" + std::string(text) + "'");
            BigInt den = 1;
            for (std::size_t i = 0; i < fpart.size(); ++i) den *= 10;
            result = Rat(whole * den + frac, den);
        }
    }
    return negative ? -result : result;
}

std::string format_rational(const Rat& r) {
    std::string s = r.numerator().str();
    if (r.denominator() != 1) {
        s += '/';
        s += r.denominator().str();
    }
    return s;
}

int floor_log2_inverse(const Rat& r) {
    if (r <= Rat(0) || r > Rat(1)) throw ParameterRange("floor_log2_inverse: argument must be in (0,1]");
    // Largest e with 2^e <= den/num, i.e. num * 2^e <= den.
    int e = 0;
    BigInt pow = r.numerator();
    while (pow * 2 <= r.denominator()) {
        pow *= 2;
        ++e;
    }
    return e;
}

int ceil_log2_inverse(const Rat& r) {
    if (r <= Rat(0) || r > Rat(1)) throw ParameterRange("ceil_log2_inverse: argument must be in (0,1]");
    int e = 0;
    BigInt pow = r.numerator();
    while (pow < r.denominator()) {
        pow *= 2;
        ++e;
    }
    return e;
}

BigInt ceil_div(const BigInt& a, const BigInt& b) {
    if (b <= 0) throw ParameterRange("ceil_div: denominator must be positive");
    BigInt q = a / b;
    if (a % b != 0 && a > 0) ++q;
    return q;
}

std::uint64_t ceil_to_u64(const Rat& r) {
    if (r < Rat(0)) throw ParameterRange("ceil_to_u64: negative value");
    BigInt q = ceil_div(r.numerator(), r.denominator());
    if (q > BigInt(std::numeric_limits<std::uint64_t>::max()))
        throw ScaleExceeded("ceil_to_u64: value exceeds 64-bit range");
    return q.convert_to<std::uint64_t>();
}

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;

Real to_real(const Rat& r) {
    return Real(r.numerator()) / Real(r.denominator());
}

// Ceiling of a value known to be irrational: floor plus one, guarded so 100
// digits of precision leave no doubt which side of an integer the value is on.
std::uint64_t ceil_irrational(const Real& x) {
    if (x < 0) throw ParameterRange("guarded ceiling: negative value");
    Real fl = boost::multiprecision::floor(x);
    Real frac = x - fl;
    const Real margin("1e-60");
    if (frac < margin || frac > 1 - margin)
        throw std::logic_error("guarded ceiling: value within precision margin of an integer");
    if (fl >= Real(std::numeric_limits<std::int64_t>::max()))
        throw ScaleExceeded("guarded ceiling: value exceeds 64-bit range");
    return std::uint64_t(fl.convert_to<std::int64_t>()) + 1;
}

} // namespace

std::uint64_t ceil_rat_mul_log2(const Rat& r, std::uint64_t value) {
    if (r < Rat(0)) throw ParameterRange("ceil_rat_mul_log2: negative multiplier");
    if (value < 1) throw ParameterRange("ceil_rat_mul_log2: value must be at least 1");
    if (r == Rat(0) || value == 1) return 0;
    if ((value & (value - 1)) == 0) {
        // Power of two: the log is an integer and the product stays rational.
        unsigned j = 0;
        for (std::uint64_t v = value; v > 1; v >>= 1) ++j;
        return ceil_to_u64(r * Rat(BigInt(j)));
    }
    Real x = to_real(r) * boost::multiprecision::log(Real(value)) /
             boost::multiprecision::log(Real(2));
    return ceil_irrational(x);
}

std::uint64_t ceil_rat_mul_ln(const Rat& r, std::uint64_t value) {
    if (r < Rat(0)) throw ParameterRange("ceil_rat_mul_ln: negative multiplier");
    if (value < 1) throw ParameterRange("ceil_rat_mul_ln: value must be at least 1");
    if (r == Rat(0) || value == 1) return 0;
    Real x = to_real(r) * boost::multiprecision::log(Real(value));
    return ceil_irrational(x);
}

} // namespace supplab
