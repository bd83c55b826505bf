#include "lindyn/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace lindyn {

static std::int64_t parse_int(const std::string& s) {
    if (s.empty()) throw config_error("rational: empty integer field");
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw config_error("rational: cannot parse '" + s + "'");
    }
    if (pos != s.size()) throw config_error("rational: trailing characters in '" + s + "'");
    return v;
}

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }
    const auto point = text.find('.');
    if (point != std::string::npos) {
        const std::string whole = text.substr(0, point);
        const std::string frac = text.substr(point + 1);
        if (frac.size() > 18) throw config_error("rational: too many decimal digits in '" + text + "'");
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const bool neg = !whole.empty() && whole[0] == '-';
        const std::int64_t w =
            (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
        const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
        const std::int64_t mag = (w < 0 ? -w : w) * den + f;
        return Rational(neg ? -mag : mag, den);
    }
    return Rational(parse_int(text));
}

Rational rational_from_double(double v, std::int64_t max_den) {
    // Continued-fraction expansion; exact for every small-denominator input.
    if (!(v == v)) throw config_error("rational: NaN exponent");
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = v;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(x);
        const std::int64_t a = static_cast<std::int64_t>(fl);
        const std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (static_cast<double>(p1) / static_cast<double>(q1) == v) return Rational(p1, q1);
        const double rem = x - fl;
        if (rem == 0.0) break;
        x = 1.0 / rem;
    }
    if (q1 != 0 && static_cast<double>(p1) / static_cast<double>(q1) == v) return Rational(p1, q1);
    throw config_error("rational: " + std::to_string(v) + " is not a small rational");
}

}  // namespace lindyn
