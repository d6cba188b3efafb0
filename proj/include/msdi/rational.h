#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace msdi {

using Rational = boost::multiprecision::cpp_rational;

/// "p/q" form, or "p" for integers.
std::string to_string(const Rational &r);
Rational parse_rational(std::string_view s);
double to_double(const Rational &r);
/// Exact value of a binary floating-point number.
Rational exact_from_double(double v);

}  // namespace msdi
