#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace caplab {

// Exact arithmetic for coordinates, distances and radii. Set comparisons
// (open vs closed neighborhoods) must never run through floating point.
using Rat = boost::rational<std::int64_t>;

inline Rat rat(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rat(num, den);
}

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rat& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Largest integer k with k <= r. Callers pass non-negative radii only.
inline std::int64_t floor_nonneg(const Rat& r) {
    if (r < Rat(0)) throw std::invalid_argument("floor_nonneg: negative value");
    return r.numerator() / r.denominator();
}

}  // namespace caplab
