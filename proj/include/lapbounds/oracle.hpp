#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lapbounds/bounds.hpp"
#include "lapbounds/errors.hpp"
#include "lapbounds/problems.hpp"
#include "lapbounds/quadrature.hpp"

namespace lapbounds {

struct empirical_error_record {
    double n = 0.0;
    double I_oracle = 0.0;
    double leading = 0.0;
    double E = 0.0;
    enum class method_kind { quadrature, exact_sum } method = method_kind::quadrature;
};

inline std::string to_string(empirical_error_record::method_kind m) {
    return m == empirical_error_record::method_kind::quadrature ? "quadrature" : "exact_sum";
}

inline std::vector<double> geometric_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1)
        throw invalid_input("geometric_grid: bad range");
    std::vector<double> g(count);
    g.front() = lo;
    for (int i = 1; i + 1 < count; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1));
    if (count > 1) g.back() = hi;
    return g;
}

// Leading factor of the problem's integral at n: (2pi/(s n))^{d/2} / sqrt(det H).
inline double leading_factor(const problem& p, double n) {
    const double m = p.exponent_scale * n;
    return std::pow(2.0 * M_PI / m, p.local.d / 2.0) / std::sqrt(p.local.det_H());
}

// ---------------------------------------------------------------------------
// 1D route for the separable family: I(n) = i(n)^d with i(n) a 1D integral.
// ---------------------------------------------------------------------------

inline double integrate_separable(double gamma, int d, double n,
                                  const quadrature_spec& spec = {}) {
    spec.validate();
    if (!(gamma > 0.0 && gamma < 1.0))
        throw invalid_input("integrate_separable: gamma must lie in (0, 1)");
    if (!(n > 0.0)) throw invalid_input("integrate_separable: requires n > 0");
    auto f1 = [gamma, n](double x) {
        return std::exp(-n * (x * x + x * x * x + std::pow(std::fabs(x), 3.0 + gamma)));
    };
    const double q = separable_quadratic_floor(gamma);
    const double T = -std::log(spec.rel_tol) + 25.0;
    double L = spec.box_halfwidth > 0.0 ? spec.box_halfwidth : std::sqrt(T / (n * q));
    const double i1 = integrate_1d(f1, -L, L, spec.rel_tol, spec.max_panels);
    // truncation audit: doubling the box must not change the value
    const double i2 = integrate_1d(f1, -2.0 * L, 2.0 * L, spec.rel_tol, spec.max_panels);
    if (std::fabs(i2 - i1) > 20.0 * spec.rel_tol * std::fabs(i1))
        throw no_convergence("integrate_separable: truncation box too small");
    return std::pow(i2, d);
}

// ---------------------------------------------------------------------------
// General route: tensor-product Gauss-Legendre over a box that carries all of
// the integrand mass. The box is sized from the local data: a Gaussian tail
// bound with the quadratic floor inside B_r, plus the exterior-gap bound
// I_tail <= I(n1) e^{-(m - m1) Delta} outside. When neither applies (small n)
// a bounded domain falls back to its full bounding box.
// ---------------------------------------------------------------------------

inline double integrate_nd(const problem& p, double n, const quadrature_spec& spec = {},
                           bool weight_by_g = false) {
    spec.validate();
    if (p.local.d > 3) throw dimension_too_large("integrate_nd: d > 3 not supported");
    if (!(n > 0.0)) throw invalid_input("integrate_nd: requires n > 0");
    const int d = p.local.d;
    const double m = p.exponent_scale * n;
    const double m1 = p.exponent_scale * p.local.n1;

    const double magnitude = leading_factor(p, n);
    const double tail_target = 0.1 * spec.rel_tol * magnitude;
    const double T = -std::log(spec.rel_tol) + 16.0 + 3.0 * d;

    bool shrunk = false;
    double L = 0.0;
    if (spec.box_halfwidth > 0.0) {
        L = spec.box_halfwidth;
        shrunk = true;
    } else {
        const double gap_tail =
            m > m1 ? p.local.I_n1 * std::exp(-(m - m1) * p.local.Delta) : 1e300;
        if (p.quad_floor_local > 0.0) {
            const double Lg = std::sqrt(T / (m * p.quad_floor_local));
            if (Lg <= p.local.r && gap_tail <= tail_target) {
                L = Lg;
                shrunk = true;
            }
        }
        if (!shrunk && p.quad_floor_global > 0.0) {
            L = std::sqrt(T / (m * p.quad_floor_global));
            shrunk = true;
        }
        if (!shrunk && !p.bounded)
            throw no_convergence("integrate_nd: cannot size a safe box for this problem");
    }

    auto clip_box = [&](double halfwidth) {
        nd_box b;
        b.lo.assign(d, -halfwidth);
        b.hi.assign(d, halfwidth);
        if (p.bounded)
            for (int i = 0; i < d; ++i) {
                b.lo[i] = std::max(b.lo[i], p.box.lo[i]);
                b.hi[i] = std::min(b.hi[i], p.box.hi[i]);
            }
        return b;
    };

    auto integrand = [&](const std::vector<double>& t) {
        const double ft = p.f_eval(t);
        if (std::isinf(ft)) return 0.0;
        const double e = std::exp(-m * ft);
        return weight_by_g && p.g_eval ? e * p.g_eval(t) : e;
    };

    if (!shrunk) {
        // full bounding box of a bounded domain
        return integrate_box(integrand, p.box, spec);
    }
    const double v1 = integrate_box(integrand, clip_box(L), spec);
    const double v2 = integrate_box(integrand, clip_box(2.0 * L), spec);
    if (std::fabs(v2 - v1) > 50.0 * spec.rel_tol * std::fabs(v1))
        throw no_convergence("integrate_nd: box doubling changed the value");
    return v2;
}

// ---------------------------------------------------------------------------
// Empirical relative error E(n) = I_oracle(n)/leading(n) - 1, with the route
// chosen per problem: the exact combinatorial sum for Dixon problems at
// integer n (log-domain arithmetic, no overflow at any n), quadrature
// otherwise.
// ---------------------------------------------------------------------------

inline constexpr int dixon_exact_route_max_n = 500;

inline empirical_error_record empirical_error(const problem& p, double n,
                                              const quadrature_spec& spec = {}) {
    empirical_error_record rec;
    rec.n = n;
    rec.leading = leading_factor(p, n);

    const double n_round = std::round(n);
    const bool integer_n = std::fabs(n - n_round) < 1e-9 && n_round >= 1.0;
    if (p.hook == problem::oracle_hook::dixon_sum && integer_n &&
        n_round <= dixon_exact_route_max_n) {
        const int d = p.local.d;
        const int ni = static_cast<int>(n_round);
        const bigint S = dixon_sum_exact(d + 1, ni);
        if (S.sign() <= 0)
            throw no_convergence("empirical_error: exact sum is not positive");
        const double log_I =
            dixon_log_I_from_sum(d, n_round, S.log_abs(), p.hook_log_jacobian);
        rec.I_oracle = std::exp(log_I);
        rec.E = std::expm1(log_I - std::log(rec.leading));
        rec.method = empirical_error_record::method_kind::exact_sum;
        return rec;
    }

    if (p.hook == problem::oracle_hook::separable_1d) {
        rec.I_oracle = integrate_separable(p.gamma, p.local.d, n, spec);
    } else {
        rec.I_oracle = integrate_nd(p, n, spec);
    }
    rec.E = rec.I_oracle / rec.leading - 1.0;
    rec.method = empirical_error_record::method_kind::quadrature;
    return rec;
}

// ---------------------------------------------------------------------------
// Odd-moment vanishing: int_{B_R} e^{-||u||^2/2} ||u||^beta d3f(0, A u) du = 0
// for every R > 0, beta >= 0 and any matrix A. Evaluated on a fixed symmetric
// tensor grid (deterministic order), together with the |d3f| normalizer that
// calibrates "relative to" comparisons.
// ---------------------------------------------------------------------------

namespace detail {

template <typename F>
double ball_moment_integral(int d, double R, const F& fn) {
    // 12 uniform panels per axis, 16-point Gauss-Legendre within each panel
    const int panels = 12;
    std::vector<double> nodes, weights;
    for (int p = 0; p < panels; ++p) {
        const double a = -R + 2.0 * R * p / panels;
        const double b = -R + 2.0 * R * (p + 1) / panels;
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < 8; ++i) {
            nodes.push_back(c - h * quad::gl16_x[7 - i]);
            weights.push_back(h * quad::gl16_w[7 - i]);
        }
        for (int i = 0; i < 8; ++i) {
            nodes.push_back(c + h * quad::gl16_x[i]);
            weights.push_back(h * quad::gl16_w[i]);
        }
    }
    const int nn = static_cast<int>(nodes.size());
    quad::kahan_sum sum;
    std::vector<int> idx(d, 0);
    std::vector<double> u(d);
    for (;;) {
        double w = 1.0, r2 = 0.0;
        for (int i = 0; i < d; ++i) {
            u[i] = nodes[idx[i]];
            w *= weights[idx[i]];
            r2 += u[i] * u[i];
        }
        if (r2 <= R * R) sum.add(w * fn(u, r2));
        int k = 0;
        while (k < d && ++idx[k] == nn) idx[k++] = 0;
        if (k == d) break;
    }
    return sum.value();
}

}  // namespace detail

inline double odd_moment_check(const third_tensor& t3, const sym_matrix& A, double beta,
                               double R) {
    const int d = t3.dim();
    if (d > 3) throw dimension_too_large("odd_moment_check: d > 3 not supported");
    if (A.dim() != d) throw invalid_input("odd_moment_check: matrix dimension mismatch");
    if (beta < 0.0 || !(R > 0.0)) throw invalid_input("odd_moment_check: bad beta or R");
    return detail::ball_moment_integral(d, R, [&](const std::vector<double>& u, double r2) {
        std::vector<double> au(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) au[i] += A(i, j) * u[j];
        const double w = std::exp(-0.5 * r2) * (beta == 0.0 ? 1.0 : std::pow(r2, 0.5 * beta));
        return w * d3f_eval(t3, au);
    });
}

// Same integral with |d3f| in place of d3f; the magnitude scale against which
// the vanishing check is relative.
inline double odd_moment_reference(const third_tensor& t3, const sym_matrix& A, double beta,
                                   double R) {
    const int d = t3.dim();
    if (d > 3) throw dimension_too_large("odd_moment_reference: d > 3 not supported");
    return detail::ball_moment_integral(d, R, [&](const std::vector<double>& u, double r2) {
        std::vector<double> au(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) au[i] += A(i, j) * u[j];
        const double w = std::exp(-0.5 * r2) * (beta == 0.0 ? 1.0 : std::pow(r2, 0.5 * beta));
        return w * std::fabs(d3f_eval(t3, au));
    });
}

}  // namespace lapbounds
