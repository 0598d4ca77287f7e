#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace crs {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact rational equal to the shortest decimal string that round-trips to v,
// so 0.1 becomes 1/10 rather than the nearest dyadic value.
Rational decimal_rational(double v);

// Exact rational parsed from "p/q", a decimal literal or scientific notation.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double v) { return v; }

}  // namespace crs
