#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lapbounds/bigint.hpp"
#include "lapbounds/bounds.hpp"
#include "lapbounds/errors.hpp"
#include "lapbounds/local_model.hpp"
#include "lapbounds/quadrature.hpp"

namespace lapbounds {

// An evaluatable exponent together with its local data and an oracle hook.
// f_eval returns +infinity outside the domain, so oracles can integrate over
// enclosing boxes safely. Everything is immutable after construction and the
// evaluators are pure, so problems are freely shareable across threads.
struct problem {
    enum class oracle_hook { none, separable_1d, dixon_sum };

    problem(std::string name_, local_expansion local_, double exponent_scale_,
            std::function<double(const std::vector<double>&)> f)
        : name(std::move(name_)), local(std::move(local_)),
          exponent_scale(exponent_scale_), f_eval(std::move(f)) {}

    std::string name;
    local_expansion local;
    double exponent_scale = 1.0;  // integrand is e^{-scale * n * f}
    std::function<double(const std::vector<double>&)> f_eval;
    std::function<double(const std::vector<double>&)> g_eval;  // optional
    std::optional<g_data> gdata;

    bool bounded = false;
    nd_box box;  // bounding box of the domain when bounded

    // f >= quad_floor_local * ||t||^2 on B_r (from the cubic-model data), and
    // f >= quad_floor_global * ||t||^2 everywhere when the latter is positive.
    double quad_floor_local = 0.0;
    double quad_floor_global = 0.0;

    oracle_hook hook = oracle_hook::none;
    double gamma = 0.0;             // separable problems
    double hook_log_jacobian = 0.0; // log of the volume factor vs the sum coordinates
};

namespace detail {

inline double fd_gradient_norm(const problem& p) {
    const int d = p.local.d;
    const double h = 1e-4;
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        std::vector<double> tp(d, 0.0), tm(d, 0.0);
        tp[i] = h;
        tm[i] = -h;
        const double g = (p.f_eval(tp) - p.f_eval(tm)) / (2.0 * h);
        s += g * g;
    }
    return std::sqrt(s);
}

inline double fd_hessian_max_dev(const problem& p) {
    const int d = p.local.d;
    const double h = 1e-4;
    double dev = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double hij;
            if (i == j) {
                std::vector<double> tp(d, 0.0), tm(d, 0.0);
                tp[i] = h;
                tm[i] = -h;
                hij = (p.f_eval(tp) - 0.0 + p.f_eval(tm)) / (h * h);
            } else {
                std::vector<double> tpp(d, 0.0), tpm(d, 0.0), tmp(d, 0.0), tmm(d, 0.0);
                tpp[i] = h;  tpp[j] = h;
                tpm[i] = h;  tpm[j] = -h;
                tmp[i] = -h; tmp[j] = h;
                tmm[i] = -h; tmm[j] = -h;
                hij = (p.f_eval(tpp) - p.f_eval(tpm) - p.f_eval(tmp) + p.f_eval(tmm)) /
                      (4.0 * h * h);
            }
            dev = std::max(dev, std::fabs(hij - p.local.H(i, j)));
        }
    return dev;
}

inline void validate_problem(const problem& p) {
    const std::vector<double> zero(p.local.d, 0.0);
    if (std::fabs(p.f_eval(zero)) > 1e-12)
        throw invalid_input(p.name + ": f(0) != 0");
    if (fd_gradient_norm(p) > 1e-6)
        throw invalid_input(p.name + ": gradient at 0 is not numerically zero");
    const double scale = std::max(1.0, p.local.H.max_abs());
    if (fd_hessian_max_dev(p) > 1e-6 * scale * 10.0)
        throw invalid_input(p.name + ": Hessian of f_eval does not match local data");
}

// Gap recipe Delta = lambda r^2/2 - D r^3 - C r^{2+alpha}; the coefficient of
// r^2 left over is the local quadratic floor.
inline double quadratic_floor(double lambda_min, double D, double C, double r,
                              double alpha) {
    return 0.5 * lambda_min - D * r - C * std::pow(r, alpha);
}

inline double convexity_gap(double lambda_min, double D, double C, double r,
                            double alpha) {
    return r * r * quadratic_floor(lambda_min, D, C, r, alpha);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Separable cubic family: f(t) = sum t_i^2 + sum t_i^3 + sum |t_i|^{3+gamma},
// gamma in (0,1). The cubic-model remainder is exactly sum |t_i|^{3+gamma},
// so (A1) holds with C = 1, alpha = gamma + 1 on every ball.
// ---------------------------------------------------------------------------

// Global quadratic floor of the 1D factor x^2 + x^3 + |x|^{3+gamma}: the
// minimum of 1 + x + |x|^{1+gamma} over x < 0 (the x > 0 side is >= 1).
inline double separable_quadratic_floor(double gamma) {
    double q = 1.0;
    for (int i = 0; i <= 4000; ++i) {
        const double x = -2.0 * i / 4000.0;
        q = std::min(q, 1.0 + x + std::pow(-x, 1.0 + gamma));
    }
    return q;
}

inline problem separable_cubic(int d, double gamma, double r_request = 0.0) {
    if (d < 2) throw invalid_input("separable_cubic: d must be >= 2");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw invalid_input("separable_cubic: gamma must lie in (0, 1)");

    const double alpha = gamma + 1.0;
    const double C = 1.0;
    const double D = std::pow(static_cast<double>(d), 1.5);  // max third partial is 6
    const double lambda = 2.0;

    // Default radius 0.25, halved until the gap recipe stays positive; an
    // explicitly requested radius must already give a positive gap.
    double r = r_request > 0.0 ? r_request : 0.25;
    if (r_request > 0.0) {
        if (detail::quadratic_floor(lambda, D, C, r, alpha) <= 0.0)
            throw invalid_input("separable_cubic: requested r gives a nonpositive gap");
    } else {
        int guard = 0;
        while (detail::quadratic_floor(lambda, D, C, r, alpha) <= 0.0 && guard++ < 60)
            r *= 0.5;
    }
    const double Delta = detail::convexity_gap(lambda, D, C, r, alpha);

    std::vector<double> t3(static_cast<size_t>(d) * d * d, 0.0);
    for (int i = 0; i < d; ++i)
        t3[(static_cast<size_t>(i) * d + i) * d + i] = 6.0;

    auto f = [d, gamma](const std::vector<double>& t) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double x = t[i];
            s += x * x + x * x * x + std::pow(std::fabs(x), 3.0 + gamma);
        }
        return s;
    };

    // I(n1) at n1 = 1 by the 1D oracle (separable, so i(1)^d).
    const double qfloor = separable_quadratic_floor(gamma);
    const double L1 = std::sqrt(48.0 / qfloor);
    const double i1 = integrate_1d(
        [gamma](double x) {
            return std::exp(-(x * x + x * x * x + std::pow(std::fabs(x), 3.0 + gamma)));
        },
        -L1, L1, 1e-12);
    const double I1 = std::pow(i1, d);

    std::ostringstream name;
    name << "separable-cubic:d=" << d << ",gamma=" << gamma;

    problem p(
        name.str(),
        local_expansion(d, sym_matrix::diagonal(std::vector<double>(d, 2.0)),
                        third_tensor(d, std::move(t3)), C, alpha, r, r, Delta, 1.0, I1),
        1.0, f);
    p.quad_floor_local = detail::quadratic_floor(lambda, D, C, r, alpha);
    p.quad_floor_global = qfloor;
    p.hook = problem::oracle_hook::separable_1d;
    p.gamma = gamma;
    detail::validate_problem(p);
    return p;
}

// ---------------------------------------------------------------------------
// Dixon-sum exponent in the original angular coordinates:
//   f(phi) = -log cos(sum phi_i - ahat) - sum log cos(phi_i + ahat) - f0
// on Omega = {phi_i < d*ahat, sum phi_i > -d*ahat}, ahat = pi/(2(d+1)).
// The integrand of interest is e^{-2 n f}, i.e. exponent scale 2.
// ---------------------------------------------------------------------------

struct dixon_spec {
    int d = 2;
    double eta = 1.0 / 3.0;  // ball-size parameter in (0, 1)
};

namespace detail {

inline double dixon_u(double t) {  // (1 + 2 sin^2) / cos^4
    const double c = std::cos(t), s = std::sin(t);
    return (1.0 + 2.0 * s * s) / (c * c * c * c);
}

struct dixon_data {
    double ahat, lambda, C, D, r, Delta;
};

inline dixon_data dixon_local_data(int d, double eta) {
    dixon_data x;
    x.ahat = M_PI / (2.0 * (d + 1));
    const double c = std::cos(x.ahat), s = std::sin(x.ahat);
    x.lambda = 1.0 / (c * c);
    x.C = d * d / 12.0 *
          (dixon_u((eta * d + 1.0) * x.ahat) + dixon_u((eta * std::sqrt(d) + 1.0) * x.ahat));
    x.D = std::pow(static_cast<double>(d), 1.5) / 3.0 * s / (c * c * c);
    x.r = eta * std::sqrt(static_cast<double>(d)) * x.ahat;
    x.Delta = convexity_gap(x.lambda, x.D, x.C, x.r, 2.0);
    return x;
}

inline double dixon_eta_max(int d) {
    double lo = 1e-6, hi = 1.0 - 1e-9;
    if (dixon_local_data(d, lo).Delta <= 0.0) return 0.0;
    if (dixon_local_data(d, hi).Delta > 0.0) return hi;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dixon_local_data(d, mid).Delta > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace detail

inline problem dixon_exponent(const dixon_spec& spec) {
    const int d = spec.d;
    if (d < 2) throw invalid_input("dixon_exponent: d must be >= 2");
    if (!(spec.eta > 0.0 && spec.eta < 1.0))
        throw invalid_input("dixon_exponent: eta must lie in (0, 1)");

    const auto x = detail::dixon_local_data(d, spec.eta);
    if (!(x.Delta > 0.0)) {
        std::ostringstream msg;
        msg << "dixon_exponent: gap is nonpositive at eta=" << spec.eta
            << "; largest feasible eta for d=" << d << " is about "
            << detail::dixon_eta_max(d);
        throw delta_nonpositive(msg.str(), detail::dixon_eta_max(d));
    }

    const double ahat = x.ahat;
    const double c = std::cos(ahat), s = std::sin(ahat);

    std::vector<double> h(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            h[static_cast<size_t>(i) * d + j] = ((i == j ? 2.0 : 1.0)) / (c * c);

    const double t3_off = -2.0 * s / (c * c * c);
    std::vector<double> t3(static_cast<size_t>(d) * d * d, t3_off);
    for (int i = 0; i < d; ++i)
        t3[(static_cast<size_t>(i) * d + i) * d + i] = 0.0;  // (1 - delta_ij delta_jk) pattern

    const double f0 = -(d + 1) * std::log(c);
    auto f = [d, ahat, f0](const std::vector<double>& t) {
        double sum = 0.0;
        for (double v : t) sum += v;
        const double c0 = std::cos(sum - ahat);
        if (!(c0 > 0.0)) return std::numeric_limits<double>::infinity();
        double val = -std::log(c0);
        for (double v : t) {
            const double ci = std::cos(v + ahat);
            if (!(ci > 0.0)) return std::numeric_limits<double>::infinity();
            val -= std::log(ci);
        }
        return val - f0;
    };

    const double I1 = (std::pow(2.0, d) - 1.0) * std::pow(M_PI / 4.0, d);

    std::ostringstream name;
    name << "dixon:d=" << d << ",eta=" << spec.eta;

    problem p(
        name.str(),
        local_expansion(d, sym_matrix(d, std::move(h)), third_tensor(d, std::move(t3)),
                        x.C, 2.0, x.r, x.r, x.Delta, 1.0, I1),
        2.0, f);
    p.bounded = true;
    p.box.lo.assign(d, -static_cast<double>(d) * d * ahat);
    p.box.hi.assign(d, d * ahat);
    p.quad_floor_local = detail::quadratic_floor(x.lambda, x.D, x.C, x.r, 2.0);
    p.hook = problem::oracle_hook::dixon_sum;
    detail::validate_problem(p);
    return p;
}

// ---------------------------------------------------------------------------
// The d = 2 problem after the cross-term-eliminating change of variables
// phi1 = (sqrt3/2)x - y/2, phi2 = y:
//   f(x,y) = -log cos((sqrt3/2)x - y/2 + pi/6) - log cos(-(sqrt3/2)x - y/2 + pi/6)
//            - log cos(y + pi/6) + 3 log(sqrt3/2)
// with cubic model x^2 + y^2 + (sqrt3/9)(y^3 - 3x^2 y) and remainder constant
// C = (3/32) (cos^{-4}(1+2sin^2))(r + pi/6).
// ---------------------------------------------------------------------------

inline problem dixon2_transformed(double r = 0.0) {
    if (r == 0.0) r = M_PI / std::sqrt(108.0);
    if (!(r > 0.0 && r < M_PI / 3.0))
        throw invalid_input("dixon2_transformed: r must lie in (0, pi/3)");

    const double C = 3.0 / 32.0 * detail::dixon_u(r + M_PI / 6.0);
    const double c3 = 2.0 * std::sqrt(3.0) / 3.0;  // d^3 f / dy^3 at 0
    const double lambda = 2.0;
    const double D = std::pow(2.0, 1.5) / 6.0 * c3;  // = 2 sqrt6 / 9
    const double Delta = detail::convexity_gap(lambda, D, C, r, 2.0);
    if (!(Delta > 0.0))
        throw delta_nonpositive("dixon2_transformed: gap is nonpositive at this r", 0.0);

    std::vector<double> t3(8, 0.0);
    // indices (x=0, y=1); nonzero pattern: yyy = c3, xxy = xyx = yxx = -c3
    t3[(1 * 2 + 1) * 2 + 1] = c3;
    t3[(0 * 2 + 0) * 2 + 1] = -c3;
    t3[(0 * 2 + 1) * 2 + 0] = -c3;
    t3[(1 * 2 + 0) * 2 + 0] = -c3;

    const double s32 = std::sqrt(3.0) / 2.0;
    const double f0 = -3.0 * std::log(std::cos(M_PI / 6.0)) + 3.0 * std::log(s32);
    auto f = [s32, f0](const std::vector<double>& t) {
        const double x = t[0], y = t[1];
        const double a1 = s32 * x - 0.5 * y + M_PI / 6.0;
        const double a2 = -s32 * x - 0.5 * y + M_PI / 6.0;
        const double a3 = y + M_PI / 6.0;
        const double c1 = std::cos(a1), c2 = std::cos(a2), cc3 = std::cos(a3);
        if (!(c1 > 0.0 && c2 > 0.0 && cc3 > 0.0))
            return std::numeric_limits<double>::infinity();
        return -std::log(c1) - std::log(c2) - std::log(cc3) + 3.0 * std::log(s32) - f0;
    };

    // Known bound of int e^{-2 f} dx dy: the angular-coordinate bound
    // (2^d - 1)(pi/4)^d divided by the Jacobian sqrt(3)/2 of the substitution.
    const double I1 = 3.0 * (M_PI / 4.0) * (M_PI / 4.0) / s32;

    problem p(
        "dixon2:r2=" + std::to_string(r * r),
        local_expansion(2, sym_matrix::diagonal({2.0, 2.0}), third_tensor(2, std::move(t3)),
                        C, 2.0, r, r, Delta, 1.0, I1),
        2.0, f);
    p.bounded = true;
    const double v = M_PI / std::sqrt(3.0);
    p.box.lo = {-v, -2.0 * M_PI / 3.0};
    p.box.hi = {v, M_PI / 3.0};
    p.quad_floor_local = detail::quadratic_floor(lambda, D, C, r, 2.0);
    p.hook = problem::oracle_hook::dixon_sum;
    p.hook_log_jacobian = std::log(1.0 / s32);  // volume factor of the substitution
    detail::validate_problem(p);
    return p;
}

// ---------------------------------------------------------------------------
// Exact alternating binomial sums S(s,n) = sum_k (-1)^{k+n} C(2n,k)^s and the
// leading-order approximation of S(d+1,n).
// ---------------------------------------------------------------------------

// Binomial row C(m, 0..m) by the Pascal recurrence, exact integers throughout.
inline std::vector<bigint> binomial_row(int m) {
    std::vector<bigint> row{bigint(1)};
    for (int level = 1; level <= m; ++level) {
        std::vector<bigint> next(level + 1);
        next[0] = bigint(1);
        next[level] = bigint(1);
        for (int k = 1; k < level; ++k) next[k] = row[k - 1] + row[k];
        row = std::move(next);
    }
    return row;
}

inline bigint dixon_sum_exact(int s, int n) {
    if (s < 1 || n < 1) throw invalid_input("dixon_sum_exact: requires s >= 1, n >= 1");
    const auto row = binomial_row(2 * n);
    bigint pos, neg;  // separate accumulators keep each partial sum monotone
    for (int k = 0; k <= 2 * n; ++k) {
        bigint term = row[k];
        for (int j = 1; j < s; ++j) term = term * row[k];
        if ((k + n) % 2 == 0)
            pos += term;
        else
            neg += term;
    }
    return pos - neg;
}

// log of the leading-order approximation of S(d+1, n):
//   2 * 2^{2n(d+1)} pi^{-d} cos^{2n(d+1)}(ahat) (2pi/(2n))^{d/2} / sqrt(det),
// det = (d+1) cos^{-2d}(ahat). For d = 2 this collapses to 3^{3n+1/2}/(2 pi n).
inline double dixon_leading_log(int d, double n) {
    if (d < 2 || !(n > 0.0)) throw invalid_input("dixon_leading_log: requires d >= 2, n > 0");
    const double ahat = M_PI / (2.0 * (d + 1));
    const double logcos = std::log(std::cos(ahat));
    const double two_nd1 = 2.0 * n * (d + 1);
    return std::log(2.0) + two_nd1 * std::log(2.0) - d * std::log(M_PI) +
           two_nd1 * logcos + 0.5 * d * std::log(2.0 * M_PI / (2.0 * n)) -
           0.5 * (std::log(static_cast<double>(d + 1)) - 2.0 * d * logcos);
}

// log I(n) for the angular-coordinate integral, recovered from the exact sum:
// S(d+1,n) = 2 * 2^{2n(d+1)} pi^{-d} cos^{2n(d+1)}(ahat) I(n).
inline double dixon_log_I_from_sum(int d, double n, double log_S, double log_jacobian) {
    const double ahat = M_PI / (2.0 * (d + 1));
    const double two_nd1 = 2.0 * n * (d + 1);
    return log_S + d * std::log(M_PI) - (two_nd1 + 1.0) * std::log(2.0) -
           two_nd1 * std::log(std::cos(ahat)) + log_jacobian;
}

// Published reference constants of the transformed d = 2 problem, for
// reproducing the known bracket tables: K_{a,1}/2 = 0.9238,
// (K_{a,1}+K_1)/2 = 1.072, K_{a,2} = 20.48, (K_{a,2}+K_u)/4 = 5.439,
// K_l/8 = 0.1355, n0 = 1479 at exponent scale 2.
inline bound_constants dixon2_reference_constants() {
    bound_constants k;
    k.K_alpha1 = 2.0 * 0.9238;
    k.K_1 = 2.0 * (1.072 - 0.9238);
    k.K_alpha2 = 20.48;
    k.K_u = 4.0 * 5.439 - 20.48;
    k.K_l = 8.0 * 0.1355;
    k.xi = 2.0 * 0.06863;
    k.n0 = 1479.0;
    k.n2 = 240.0;
    k.relaxation = relaxation_params::base();
    k.alpha = 2.0;
    k.scale = 2.0;
    return k;
}

inline constexpr double dixon2_reference_det = 4.0;
inline constexpr int dixon2_reference_dim = 2;

// ---------------------------------------------------------------------------
// Problem selectors: "separable-cubic:d=2,gamma=0.5", "dixon:d=3,eta=0.2",
// "dixon2:r2=pi2/108". Values may be plain numbers or the forms pi/<x>,
// pi2/<x> (pi and pi^2 over a numeric denominator).
// ---------------------------------------------------------------------------

namespace detail {

inline double parse_selector_value(const std::string& v) {
    try {
        if (v.rfind("pi2/", 0) == 0)
            return M_PI * M_PI / std::stod(v.substr(4));
        if (v.rfind("pi/", 0) == 0)
            return M_PI / std::stod(v.substr(3));
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw invalid_input("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw invalid_input("problem selector: cannot parse value '" + v + "'");
    }
}

}  // namespace detail

inline problem parse_problem_selector(const std::string& selector) {
    std::string head = selector;
    std::string args;
    if (const auto colon = selector.find(':'); colon != std::string::npos) {
        head = selector.substr(0, colon);
        args = selector.substr(colon + 1);
    }
    std::vector<std::pair<std::string, double>> kv;
    std::istringstream in(args);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw invalid_input("problem selector: expected key=value, got '" + tok + "'");
        kv.emplace_back(tok.substr(0, eq), detail::parse_selector_value(tok.substr(eq + 1)));
    }
    auto get = [&kv](const std::string& key, double fallback, bool* found = nullptr) {
        for (const auto& [k, v] : kv)
            if (k == key) {
                if (found) *found = true;
                return v;
            }
        if (found) *found = false;
        return fallback;
    };

    if (head == "separable-cubic") {
        const int d = static_cast<int>(get("d", 2));
        return separable_cubic(d, get("gamma", 0.5), get("r", 0.0));
    }
    if (head == "dixon") {
        dixon_spec s;
        s.d = static_cast<int>(get("d", 2));
        s.eta = get("eta", 1.0 / 3.0);
        return dixon_exponent(s);
    }
    if (head == "dixon2") {
        bool has_r2 = false, has_r = false;
        const double r2 = get("r2", 0.0, &has_r2);
        const double r = get("r", 0.0, &has_r);
        if (has_r2) return dixon2_transformed(std::sqrt(r2));
        if (has_r) return dixon2_transformed(r);
        return dixon2_transformed();
    }
    throw invalid_input("problem selector: unknown problem '" + head + "'");
}

}  // namespace lapbounds
