#include "stochsep/numeric.hpp"

#include <cctype>
#include <cstdlib>
#include <iomanip>
#include <sstream>

namespace stochsep {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

mpz_class pow10(long e)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
    return r;
}

Rational parse_decimal(std::string_view text)
{
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = s.substr(e + 1);
        s = s.substr(0, e);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6) {
            throw ParseError("malformed exponent in number '" + std::string(text) + "'");
        }
        exponent = std::stol(std::string(exp_part));
        if (exp_negative) exponent = -exponent;
    }
    std::string digits;
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) {
        throw ParseError("malformed number '" + std::string(text) + "'");
    }
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
        throw ParseError("malformed number '" + std::string(text) + "'");
    }
    digits.append(int_part);
    digits.append(frac_part);
    if (digits.empty()) digits = "0";
    exponent -= static_cast<long>(frac_part.size());

    Rational q{mpz_class(digits, 10)};
    if (exponent > 0) {
        q *= pow10(exponent);
    } else if (exponent < 0) {
        q /= pow10(-exponent);
    }
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    std::string_view s = trim(text);
    if (s.empty()) throw ParseError("empty number");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(trim(s.substr(0, slash)));
        Rational den = parse_decimal(trim(s.substr(slash + 1)));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        Rational q = num / den;
        q.canonicalize();
        return q;
    }
    return parse_decimal(s);
}

std::string to_fraction_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal_string(const Rational& q, int digits)
{
    std::ostringstream os;
    os << std::setprecision(digits) << q.get_d();
    return os.str();
}

Rational rational_from_double(double value)
{
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite value cannot be made rational");
    Rational q(value);
    q.canonicalize();
    return q;
}

}  // namespace stochsep
