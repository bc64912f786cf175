// Exact rational arithmetic. All prices, costs, spendings and fractional
// shares in this library are arbitrary-precision rationals; nothing is ever
// rounded. cpp_rational keeps values normalized (lowest terms, positive
// denominator), which the serializers rely on.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "bichores/errors.hpp"

namespace bichores {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "p" or "p/q" with optional leading '-' on p. Not required to be in
// lowest terms; the result always is.
inline Rational parse_rational(const std::string& text) {
    auto is_int = [](const std::string& s) {
        std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
        if (start == s.size()) return false;
        for (std::size_t i = start; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            if (!is_int(text)) throw ParseError("not a rational: '" + text + "'");
            return Rational(BigInt(text));
        }
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) throw ParseError("not a rational: '" + text + "'");
        BigInt d(den);
        if (d == 0) throw ParseError("zero denominator: '" + text + "'");
        return Rational(BigInt(num), d);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("not a rational: '" + text + "'");
    }
}

// Lowest terms, "p" when the denominator is 1, else "p/q".
inline std::string format_rational(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

} // namespace bichores
