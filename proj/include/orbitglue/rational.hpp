#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitglue {

// Exact weight arithmetic. Desk-scale denominators (lcm of small periods
// times repetition counts) stay far below the int64 range.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Parses "p/q" or a bare integer "p".
inline Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text), 1);
        long long num = std::stoll(text.substr(0, slash));
        long long den = std::stoll(text.substr(slash + 1));
        return Rational(num, den);
    } catch (const boost::bad_rational&) {
        throw std::invalid_argument("rational with zero denominator: " + text);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational: " + text);
    }
}

inline Rational rational_abs(const Rational& r) {
    return r < Rational(0) ? -r : r;
}

inline void check_probability_weights(const std::vector<Rational>& weights) {
    Rational sum(0);
    for (const auto& w : weights) {
        if (w < Rational(0)) throw std::invalid_argument("negative weight " + to_string(w));
        sum += w;
    }
    if (sum != Rational(1))
        throw std::invalid_argument("weights sum to " + to_string(sum) + ", expected 1");
}

inline long long lcm_all(const std::vector<long long>& values) {
    long long acc = 1;
    for (long long v : values) acc = std::lcm(acc, v);
    return acc;
}

}  // namespace orbitglue
