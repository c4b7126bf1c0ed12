#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mwnc {

// Exact rational with machine-integer numerator/denominator. The window speed
// V is stored this way so that ceilings like ceil(V*t) never suffer float
// rounding (Table-style traces depend on the exact integer boundary).
struct Rational {
    std::int64_t num{0};
    std::int64_t den{1};

    constexpr Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    // ceil(this * t) for t >= 0, num >= 0.
    std::int64_t ceil_mul(std::int64_t t) const {
        const std::int64_t p = num * t;
        return p >= 0 ? (p + den - 1) / den : -((-p) / den);
    }

    // floor(this * t) for t >= 0, num >= 0.
    std::int64_t floor_mul(std::int64_t t) const {
        const std::int64_t p = num * t;
        return p >= 0 ? p / den : -((-p + den - 1) / den);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    // Parses "n/d", an integer, or a plain decimal like "0.72".
    static Rational parse(const std::string& s) {
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(std::stoll(s), 1);
        const std::string frac = s.substr(dot + 1);
        if (frac.size() > 9) throw std::invalid_argument("Rational: too many decimal digits: " + s);
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const std::string whole = s.substr(0, dot);
        const bool neg = !whole.empty() && whole[0] == '-';
        const std::int64_t w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
        std::int64_t n = (w < 0 ? -w : w) * den + (frac.empty() ? 0 : std::stoll(frac));
        return Rational(neg || w < 0 ? -n : n, den);
    }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

}  // namespace mwnc
