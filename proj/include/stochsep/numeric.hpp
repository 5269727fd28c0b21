#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace stochsep {

using Rational = mpq_class;

enum class NumericMode { exact, floating };

/// Tolerance applied to every sign test in floating mode.
inline constexpr double kDefaultTolerance = 1e-9;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses "12", "-0.375", "1.5e-3" or "a/b" into an exact rational.
Rational parse_rational(std::string_view text);

/// Renders a rational as "a/b" (denominator always present).
std::string to_fraction_string(const Rational& q);

/// Decimal rendering with `digits` significant digits.
std::string to_decimal_string(const Rational& q, int digits = 17);

Rational rational_from_double(double value);

template <typename T>
struct NumTraits;

template <>
struct NumTraits<Rational> {
    static constexpr bool exact = true;
    static int sign(const Rational& x) { return sgn(x); }
    static Rational from_rational(const Rational& q) { return q; }
    static double to_double(const Rational& q) { return q.get_d(); }
    static Rational from_double(double v) { return rational_from_double(v); }
    static Rational abs(const Rational& x) { return ::abs(x); }
};

template <>
struct NumTraits<double> {
    static constexpr bool exact = false;
    static int sign(double x)
    {
        if (x > kDefaultTolerance) return 1;
        if (x < -kDefaultTolerance) return -1;
        return 0;
    }
    static double from_rational(const Rational& q) { return q.get_d(); }
    static double to_double(double v) { return v; }
    static double from_double(double v) { return v; }
    static double abs(double x) { return std::fabs(x); }
};

inline int sign_of(const Rational& x) { return NumTraits<Rational>::sign(x); }
inline int sign_of(double x) { return NumTraits<double>::sign(x); }

inline double to_double(const Rational& x) { return x.get_d(); }
inline double to_double(double x) { return x; }

template <typename T>
T from_rational(const Rational& q)
{
    return NumTraits<T>::from_rational(q);
}

}  // namespace stochsep
