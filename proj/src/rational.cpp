#include "crs/rational.hpp"

#include <charconv>
#include <cmath>

#include "crs/errors.hpp"

namespace crs {

namespace {

BigInt pow10(int k) {
    BigInt p = 1;
    for (int i = 0; i < k; ++i) p *= 10;
    return p;
}

Rational parse_decimal(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    BigInt mantissa = 0;
    int frac_digits = 0;
    bool seen_dot = false;
    bool any_digit = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            any_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw InputError("not a number: '" + text + "'");
    int exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        const char* first = text.data() + pos;
        const char* last = text.data() + text.size();
        if (first != last && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, exponent);
        if (ec != std::errc() || ptr != last) throw InputError("bad exponent in '" + text + "'");
        pos = text.size();
    }
    if (pos != text.size()) throw InputError("trailing characters in '" + text + "'");
    int shift = exponent - frac_digits;
    Rational r = shift >= 0 ? Rational(mantissa * pow10(shift))
                            : Rational(mantissa, pow10(-shift));
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational decimal_rational(double v) {
    if (!std::isfinite(v)) throw InputError("non-finite value cannot be made rational");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw InputError("cannot format value");
    return parse_decimal(std::string(buf, ptr));
}

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return parse_decimal(text);
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + text + "'");
    return num / den;
}

std::string to_string(const Rational& r) { return r.str(); }

}  // namespace crs
