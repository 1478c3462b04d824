#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dimerloops {

// Cover counts and partition sums outgrow 64 bits quickly; every identity in
// this library is an exact rational statement, so all exact paths use
// unbounded-precision arithmetic.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const BigInt& v) { return v.str(); }

// Serialized as "p/q" ("p" when q == 1) so no precision is lost in result files.
inline std::string to_string(const Rational& r)
{
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

// Accepts "p/q", plain integers, and finite decimals ("0.25" -> 1/4).
inline Rational parse_rational(const std::string& s)
{
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt p(s.substr(0, slash));
        BigInt q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return Rational(p, q);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("malformed rational literal '" + s + "'");
    BigInt p(digits);
    BigInt q = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) q *= 10;
    return Rational(p, q);
}

} // namespace dimerloops
