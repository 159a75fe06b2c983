#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>

#include "carmex/arith.hpp"

namespace carmex {

namespace number_text_detail {

inline std::optional<u128> mul_checked(u128 a, u128 b) {
    if (a != 0 && b > (~u128{0} >> 1) / a) return std::nullopt;
    return a * b;
}

inline std::optional<u128> pow_checked(u128 base, unsigned e) {
    u128 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        auto m = mul_checked(r, base);
        if (!m) return std::nullopt;
        r = *m;
    }
    return r;
}

inline bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline std::optional<u128> parse_digits(const std::string& s) {
    if (!all_digits(s) || s.size() > 30) return std::nullopt;
    u128 v = 0;
    for (char c : s) v = v * 10 + static_cast<unsigned>(c - '0');
    return v;
}

// One factor: "123", "1.5e9", "10^12".
inline std::optional<u128> parse_term(const std::string& t) {
    if (auto caret = t.find('^'); caret != std::string::npos) {
        const auto base = parse_digits(t.substr(0, caret));
        const auto exp = parse_digits(t.substr(caret + 1));
        if (!base || !exp || *exp > 127) return std::nullopt;
        return pow_checked(*base, static_cast<unsigned>(*exp));
    }
    if (auto e = t.find_first_of("eE"); e != std::string::npos) {
        const std::string mant = t.substr(0, e);
        const auto exp = parse_digits(t.substr(e + 1));
        if (!exp) return std::nullopt;
        std::string digits = mant;
        unsigned frac = 0;
        if (auto dot = mant.find('.'); dot != std::string::npos) {
            digits = mant.substr(0, dot) + mant.substr(dot + 1);
            frac = static_cast<unsigned>(mant.size() - dot - 1);
        }
        auto m = parse_digits(digits);
        if (!m || *exp < frac) return std::nullopt;  // not an exact integer
        auto scale = pow_checked(10, static_cast<unsigned>(*exp - frac));
        if (!scale) return std::nullopt;
        return mul_checked(*m, *scale);
    }
    return parse_digits(t);
}

}  // namespace number_text_detail

/// Parses "1_000_000", "1e12", "2.5e10", "10^12" or products such as
/// "25*10^9" into an exact 64-bit value; throws on anything inexact.
inline natural parse_exact_natural(std::string text) {
    std::string s;
    for (char c : text)
        if (c != '_') s += c;
    if (s.empty()) throw std::invalid_argument("empty number");
    u128 value = 1;
    std::size_t start = 0;
    for (;;) {
        const auto star = s.find('*', start);
        const auto term = number_text_detail::parse_term(s.substr(start, star - start));
        if (!term) throw std::invalid_argument("not an exact integer: '" + text + "'");
        const auto v = number_text_detail::mul_checked(value, *term);
        if (!v || *v > ~natural{0}) throw std::invalid_argument("number out of range: '" + text + "'");
        value = *v;
        if (star == std::string::npos) break;
        start = star + 1;
    }
    return static_cast<natural>(value);
}

}  // namespace carmex
