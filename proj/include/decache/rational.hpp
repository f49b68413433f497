#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace decache::rational {

/// Exact rational arithmetic for rates and bit budgets. Every quantity this
/// library reports fits comfortably in 64-bit numerator/denominator.
using Rat = boost::rational<long long>;

inline long long checked_pow(long long base, unsigned exp) {
    long long r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && r > (std::int64_t{1} << 62) / (base > 0 ? base : 1))
            throw std::overflow_error("checked_pow: value does not fit in 64 bits");
        r *= base;
    }
    return r;
}

inline Rat pow(const Rat& x, unsigned exp) {
    return Rat(checked_pow(x.numerator(), exp), checked_pow(x.denominator(), exp));
}

inline std::string to_string(const Rat& x) {
    if (x.denominator() == 1) return std::to_string(x.numerator());
    return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

inline double to_double(const Rat& x) {
    return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

/// Parses "a/b" or a bare integer "a".
inline Rat parse(std::string_view s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) return Rat(std::stoll(std::string(s)), 1);
        long long num = std::stoll(std::string(s.substr(0, slash)));
        long long den = std::stoll(std::string(s.substr(slash + 1)));
        return Rat(num, den);  // boost normalizes and rejects den == 0
    } catch (const boost::bad_rational&) {
        throw std::invalid_argument("rational::parse: zero denominator in '" + std::string(s) + "'");
    } catch (const std::exception&) {
        throw std::invalid_argument("rational::parse: cannot parse '" + std::string(s) + "'");
    }
}

/// Exact integer value of x, or throws if x is not an integer.
inline long long to_integer(const Rat& x) {
    if (x.denominator() != 1) throw std::domain_error("rational::to_integer: " + to_string(x) + " is not integral");
    return x.numerator();
}

}  // namespace decache::rational
