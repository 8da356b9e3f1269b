#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "lapbounds/errors.hpp"
#include "lapbounds/linalg.hpp"

namespace lapbounds {

// Local data of the exponent function at its minimizer (normalized so that
// the minimizer is 0 and f(0) = 0):
//   - H, T3: Hessian and third-derivative tensor at 0,
//   - C, alpha, r: cubic-model remainder bound |f - q - c| <= C ||t||^{2+alpha}
//     on the ball B_r, with alpha in (1, 2],
//   - delta, Delta: convexity radius and exterior gap f >= Delta off B_{delta^r},
//   - n1, I_n1: an exponent value at which the integral is known finite and its
//     value there (or any upper bound of it; the resulting K_u stays valid
//     because it is monotone in I(n1)).
struct local_expansion {
    int d;
    sym_matrix H;
    third_tensor T3;
    double C;
    double alpha;
    double r;
    double delta;
    double Delta;
    double n1;
    double I_n1;

    local_expansion(int d_, sym_matrix H_, third_tensor T3_, double C_, double alpha_,
                    double r_, double delta_, double Delta_, double n1_, double I_n1_)
        : d(d_), H(std::move(H_)), T3(std::move(T3_)), C(C_), alpha(alpha_),
          r(r_), delta(delta_), Delta(Delta_), n1(n1_), I_n1(I_n1_) {
        if (d < 2) throw invalid_input("local_expansion: d must be >= 2");
        if (H.dim() != d || T3.dim() != d)
            throw invalid_input("local_expansion: dimension mismatch");
        if (!(C > 0.0)) throw invalid_input("local_expansion: C must be > 0");
        if (!(alpha > 1.0) || alpha > 2.0)
            throw invalid_input("local_expansion: alpha must lie in (1, 2]");
        if (!(r > 0.0) || !(delta > 0.0))
            throw invalid_input("local_expansion: r and delta must be > 0");
        if (!(Delta > 0.0)) throw invalid_input("local_expansion: Delta must be > 0");
        if (!(n1 > 0.0) || !(I_n1 > 0.0))
            throw invalid_input("local_expansion: n1 and I_n1 must be > 0");
        cholesky_upper(H);  // rejects non-positive-definite Hessians
    }

    double lambda_min() const { return min_eigenvalue(H); }
    double det_H() const { return determinant(H); }
    double D() const { return d_constant(T3); }
};

// xi = (r^2 lambda_min) ^ (2 Delta); controls the exponential tail term.
inline double xi(const local_expansion& local) {
    return std::min(local.r * local.r * local.lambda_min(), 2.0 * local.Delta);
}

}  // namespace lapbounds
