#include "msdi/rational.h"

#include <cmath>
#include <stdexcept>

namespace msdi {

std::string to_string(const Rational &r) {
    auto num = boost::multiprecision::numerator(r);
    auto den = boost::multiprecision::denominator(r);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

Rational parse_rational(std::string_view s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) {
            return Rational(boost::multiprecision::cpp_int(std::string(s)));
        }
        boost::multiprecision::cpp_int p(std::string(s.substr(0, slash)));
        boost::multiprecision::cpp_int q(std::string(s.substr(slash + 1)));
        if (q == 0) {
            throw std::invalid_argument("zero denominator");
        }
        return Rational(p, q);
    } catch (const std::runtime_error &) {
        throw std::invalid_argument("malformed rational: " + std::string(s));
    }
}

double to_double(const Rational &r) {
    return r.convert_to<double>();
}

Rational exact_from_double(double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite probability");
    }
    int exp = 0;
    double mant = std::frexp(v, &exp);
    // 53 bits of mantissa as an integer.
    auto m = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r{boost::multiprecision::cpp_int(m)};
    if (exp >= 0) {
        r *= Rational(boost::multiprecision::cpp_int(1) << exp);
    } else {
        r /= Rational(boost::multiprecision::cpp_int(1) << (-exp));
    }
    return r;
}

}  // namespace msdi
