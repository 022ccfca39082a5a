#pragma once

// Exact rational scalars and conversions between the exact and floating modes.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <concepts>
#include <string>
#include <string_view>
#include <type_traits>

#include "cylsd/error.hpp"

namespace cylsd {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Scalar types usable as the coordinate field of the groups.
template <class T>
concept Scalar = std::floating_point<T> || is_exact_v<T>;

/// Exact value of a finite binary floating-point number.
inline Rational rational_from_double(double v) {
    if (!std::isfinite(v)) throw InvalidInput("cannot convert non-finite value to a rational");
    if (v == 0.0) return Rational(0);
    int exponent = 0;
    const double mantissa = std::frexp(v, &exponent);
    // mantissa * 2^53 is an exact integer for IEEE doubles
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational r{BigInt(scaled)};
    if (exponent > 0) {
        r *= Rational(BigInt(1) << exponent);
    } else if (exponent < 0) {
        r /= Rational(BigInt(1) << -exponent);
    }
    return r;
}

/// Parses "m", "m/d", or a plain decimal such as "-0.25" exactly.
inline Rational parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    auto parse_int = [&](std::string_view s) {
        s = trim(s);
        std::string_view digits = s;
        if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
        if (digits.empty()) throw InvalidInput("malformed rational '" + std::string(text) + "'");
        for (char ch : digits) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) {
                throw InvalidInput("malformed rational '" + std::string(text) + "'");
            }
        }
        return BigInt(std::string(s.front() == '+' ? s.substr(1) : s));
    };

    const std::string_view body = trim(text);
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        const BigInt den = parse_int(body.substr(slash + 1));
        if (den == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
        return Rational(parse_int(body.substr(0, slash)), den);
    }
    if (const auto dot = body.find('.'); dot != std::string_view::npos) {
        std::string_view whole = body.substr(0, dot);
        const std::string_view frac = body.substr(dot + 1);
        bool negative = false;
        if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) {
            negative = whole.front() == '-';
            whole.remove_prefix(1);
        }
        const BigInt int_part = whole.empty() ? BigInt(0) : parse_int(whole);
        const BigInt frac_part = frac.empty() ? BigInt(0) : parse_int(frac);
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Rational r = Rational(int_part) + Rational(frac_part, scale);
        return negative ? Rational(-r) : r;
    }
    return Rational(parse_int(body));
}

/// "m/d" in lowest terms, or "m" when the denominator is 1.
inline std::string to_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

template <class To, class From>
To scalar_cast(const From& v) {
    if constexpr (std::is_same_v<To, From>) {
        return v;
    } else if constexpr (is_exact_v<To>) {
        return rational_from_double(static_cast<double>(v));
    } else if constexpr (is_exact_v<From>) {
        return v.template convert_to<To>();
    } else {
        return static_cast<To>(v);
    }
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double v) { return v; }
inline double to_double(long double v) { return static_cast<double>(v); }

template <Scalar T>
T abs_value(const T& v) {
    if constexpr (is_exact_v<T>) {
        return boost::multiprecision::abs(v);
    } else {
        return std::abs(v);
    }
}

/// Exact equality for rationals, absolute tolerance for floating values.
template <Scalar T>
bool nearly_equal(const T& x, const T& y, double tol) {
    if constexpr (is_exact_v<T>) {
        return x == y;
    } else {
        return std::abs(static_cast<long double>(x) - static_cast<long double>(y)) <= tol;
    }
}

/// Working type for accumulating sums: long double for floating inputs.
template <class T>
using accum_t = std::conditional_t<std::is_floating_point_v<T>, long double, T>;

}  // namespace cylsd
