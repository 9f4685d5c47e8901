#pragma once

// log Gamma, digamma and trigamma for positive real arguments.
//
// Each function shifts its argument upward with the usual recurrence until it
// reaches kAsymptoticThreshold and then sums the Stirling-type asymptotic
// series. Ten is far enough out that the truncated series is accurate to
// better than 1e-16 relative.

#include "alphacomp/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace alphacomp {

namespace detail {

inline constexpr double kAsymptoticThreshold = 10.0;

inline void require_positive_argument(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(name) + ": argument must be positive and finite, got " +
                          std::to_string(x));
    }
}

} // namespace detail

inline double log_gamma(double x) {
    detail::require_positive_argument(x, "log_gamma");
    // log Gamma(x) = log Gamma(x + k) - log(x (x+1) ... (x+k-1))
    double product = 1.0;
    while (x < detail::kAsymptoticThreshold) {
        product *= x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B_2k / (2k (2k-1) x^(2k-1)), k = 1..7
    const double series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 +
                                               inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
    const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
    return (x - 0.5) * std::log(x) - x + half_log_two_pi + series - std::log(product);
}

inline double digamma(double x) {
    detail::require_positive_argument(x, "digamma");
    double shift = 0.0;
    while (x < detail::kAsymptoticThreshold) {
        shift += 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    // B_2k / (2k x^2k), k = 1..7
    const double series =
        inv2 * (1.0 / 12.0 +
                inv2 * (-1.0 / 120.0 +
                        inv2 * (1.0 / 252.0 +
                                inv2 * (-1.0 / 240.0 +
                                        inv2 * (1.0 / 132.0 +
                                                inv2 * (-691.0 / 32760.0 + inv2 * (1.0 / 12.0)))))));
    return std::log(x) - 0.5 / x - series - shift;
}

inline double trigamma(double x) {
    detail::require_positive_argument(x, "trigamma");
    double shift = 0.0;
    while (x < detail::kAsymptoticThreshold) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B_2k / x^(2k+1), k = 1..7
    const double series =
        inv * inv2 *
        (1.0 / 6.0 +
         inv2 * (-1.0 / 30.0 +
                 inv2 * (1.0 / 42.0 +
                         inv2 * (-1.0 / 30.0 +
                                 inv2 * (5.0 / 66.0 + inv2 * (-691.0 / 2730.0 + inv2 * (7.0 / 6.0)))))));
    return inv + 0.5 * inv2 + series + shift;
}

} // namespace alphacomp
