#pragma once

#include <cmath>

#include "lapbounds/errors.hpp"

namespace lapbounds {

// Largest x for which e^x <= 1 + x + (1+a)x^2 holds, a > -1/2.
// The left side overtakes the quadratic exactly once on (0, inf), so the
// inequality is valid on (-inf, x_a] with x_a the unique positive root of
// e^x - 1 - x - (1+a)x^2.
inline double solve_xa(double a) {
    if (!(a > -0.5)) throw invalid_input("solve_xa: requires a > -1/2");
    auto f = [a](double x) { return std::exp(x) - 1.0 - x - (1.0 + a) * x * x; };
    double hi = 1.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw no_convergence("solve_xa: no sign change found");
    }
    double lo = 0.0;
    // f < 0 just right of 0; start the bracket off the degenerate root at 0
    double lo_probe = hi * 0.5;
    while (lo_probe > 1e-12 && f(lo_probe) >= 0.0) lo_probe *= 0.5;
    lo = lo_probe;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-10 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

// Slack parameter of the quadratic exponential inequality together with its
// validity threshold. The unrelaxed bounds correspond to a = 0 with the
// fixed sub-root threshold 7/4 (the exact root of e^x = 1 + x + x^2 is
// ~1.7933; the bound formulas are stated for the 7/4 cutoff). Any other a
// uses the solved root, which reproduces the published relaxed thresholds
// (a = 1.2 gives x_a ~ 3.39).
struct relaxation_params {
    double a = 0.0;
    double x_a = 1.75;

    static relaxation_params base() { return {0.0, 1.75}; }

    static relaxation_params with_slack(double a) {
        relaxation_params r;
        r.a = a;
        r.x_a = solve_xa(a);
        return r;
    }

    // Multiplier applied to K_1 and K_{alpha,2}: the quadratic coefficient
    // (1+a) relative to the base coefficient 1.
    double quadratic_factor() const { return 1.0 + a; }

    // Multiplier applied to K_u / K_ul: the tail prefactor threshold x_a
    // relative to the base 7/4.
    double tail_factor() const { return x_a / 1.75; }
};

}  // namespace lapbounds
