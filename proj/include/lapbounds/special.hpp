#pragma once

#include <cmath>
#include <limits>

#include "lapbounds/errors.hpp"

namespace lapbounds {

// Lanczos approximation of log Gamma, g = 7 with 9 coefficients.
// Relative accuracy is better than 1e-13 on x in (0, 50], which covers every
// Pochhammer evaluation the bound constants need.
inline double log_gamma(double x) {
    static const double coef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (!(x > 0.0)) throw invalid_input("log_gamma: requires x > 0");
    const double z = x - 1.0;
    double series = coef[0];
    for (int i = 1; i < 9; ++i) series += coef[i] / (z + i);
    const double base = z + 7.5;
    constexpr double half_log_two_pi = 0.91893853320467274178;
    return half_log_two_pi + (z + 0.5) * std::log(base) - base + std::log(series);
}

// Pochhammer symbol (x)_a = Gamma(x+a)/Gamma(x) for real a >= 0.
inline double pochhammer(double x, double a) {
    if (!(x > 0.0)) throw invalid_input("pochhammer: requires x > 0");
    if (a < 0.0) throw invalid_input("pochhammer: requires a >= 0");
    if (a == 0.0) return 1.0;
    return std::exp(log_gamma(x + a) - log_gamma(x));
}

}  // namespace lapbounds
