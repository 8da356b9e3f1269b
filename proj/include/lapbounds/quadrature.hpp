#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lapbounds/errors.hpp"

namespace lapbounds {

struct quadrature_spec {
    double rel_tol = 1e-10;
    double box_halfwidth = 0.0;  // 0 = choose automatically from the local data
    int max_panels = 200000;

    void validate() const {
        if (!(rel_tol > 0.0) || rel_tol > 1e-4)
            throw invalid_input("quadrature_spec: rel_tol must lie in (0, 1e-4]");
        if (max_panels < 1) throw invalid_input("quadrature_spec: max_panels must be >= 1");
    }
};

namespace quad {

// Gauss-Kronrod 7-15 node pairs (abscissa, Gauss weight, Kronrod weight).
inline const double gk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

// 16-point Gauss-Legendre rule on [-1, 1], positive half (symmetric).
inline const double gl16_x[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
inline const double gl16_w[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

// 8-point Gauss-Legendre rule on [-1, 1], positive half; embedded error probe
// for the 16-point panels.
inline const double gl8_x[4] = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363,
};
inline const double gl8_w[4] = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763,
};

template <typename F>
void gk15_panel(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double g7 = gk15[0][1] * f0;
    double k15 = gk15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * gk15[i][0];
        const double fi = f(c + dx) + f(c - dx);
        g7 += gk15[i][1] * fi;
        k15 += gk15[i][2] * fi;
    }
    g7 *= h;
    k15 *= h;
    value = k15;
    err = std::pow(200.0 * std::fabs(g7 - k15), 1.5);
}

struct kahan_sum {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

}  // namespace quad

// Adaptive 1D integration over [a, b], Gauss-Kronrod 7-15 with interval
// bisection. Deterministic: intervals are processed worst-error-first with a
// stable tie-break, and the final sum is accumulated left-to-right with
// compensated summation.
template <typename F>
double integrate_1d(const F& f, double a, double b, double rel_tol,
                    int max_intervals = 20000) {
    struct interval {
        double a, b, value, err;
    };
    std::vector<interval> done;
    std::vector<interval> todo;
    double v0, e0;
    quad::gk15_panel(f, a, b, v0, e0);
    todo.push_back({a, b, v0, e0});

    double total = v0;
    int produced = 1;
    while (!todo.empty()) {
        // worst interval first; split it if the global error target is unmet
        size_t worst = 0;
        double esum = 0.0;
        for (size_t i = 0; i < todo.size(); ++i) {
            esum += todo[i].err;
            if (todo[i].err > todo[worst].err) worst = i;
        }
        const double target = std::max(rel_tol * std::fabs(total), 1e-305);
        if (esum <= target) break;
        interval cur = todo[worst];
        todo.erase(todo.begin() + static_cast<long>(worst));
        if (produced + 2 > max_intervals)
            throw no_convergence("integrate_1d: interval budget exhausted");
        const double mid = 0.5 * (cur.a + cur.b);
        interval left{cur.a, mid, 0, 0}, right{mid, cur.b, 0, 0};
        quad::gk15_panel(f, left.a, left.b, left.value, left.err);
        quad::gk15_panel(f, right.a, right.b, right.value, right.err);
        total += left.value + right.value - cur.value;
        produced += 2;
        if (left.err <= 1e-3 * rel_tol * std::max(std::fabs(total), 1e-300) / 8.0)
            done.push_back(left);
        else
            todo.push_back(left);
        if (right.err <= 1e-3 * rel_tol * std::max(std::fabs(total), 1e-300) / 8.0)
            done.push_back(right);
        else
            todo.push_back(right);
    }
    for (const auto& iv : todo) done.push_back(iv);
    std::sort(done.begin(), done.end(),
              [](const interval& x, const interval& y) { return x.a < y.a; });
    quad::kahan_sum s;
    for (const auto& iv : done) s.add(iv.value);
    return s.value();
}

// Axis-aligned box.
struct nd_box {
    std::vector<double> lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
};

namespace quad {

struct nd_panel {
    std::vector<double> lo, hi;
    double value = 0.0, err = 0.0;
};

struct gl_rules {
    double x16[16], w16[16], x8[8], w8[8];
    gl_rules() {
        for (int i = 0; i < 8; ++i) {
            x16[i] = -gl16_x[7 - i];
            w16[i] = gl16_w[7 - i];
            x16[8 + i] = gl16_x[i];
            w16[8 + i] = gl16_w[i];
        }
        for (int i = 0; i < 4; ++i) {
            x8[i] = -gl8_x[3 - i];
            w8[i] = gl8_w[3 - i];
            x8[4 + i] = gl8_x[i];
            w8[4 + i] = gl8_w[i];
        }
    }
};

template <typename F>
void eval_panel(const F& f, nd_panel& p) {
    static const gl_rules rules;
    const int d = static_cast<int>(p.lo.size());
    double c[3], h[3];
    for (int i = 0; i < d; ++i) {
        c[i] = 0.5 * (p.lo[i] + p.hi[i]);
        h[i] = 0.5 * (p.hi[i] - p.lo[i]);
    }
    double vol = 1.0;
    for (int i = 0; i < d; ++i) vol *= h[i];

    double s16 = 0.0, s8 = 0.0;
    std::vector<double> t(d);
    int idx[3] = {0, 0, 0};
    // 16^d sum
    for (;;) {
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            t[i] = c[i] + h[i] * rules.x16[idx[i]];
            w *= rules.w16[idx[i]];
        }
        s16 += w * f(t);
        int k = 0;
        while (k < d && ++idx[k] == 16) idx[k++] = 0;
        if (k == d) break;
    }
    // embedded 8^d sum drives the error gauge
    idx[0] = idx[1] = idx[2] = 0;
    for (;;) {
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            t[i] = c[i] + h[i] * rules.x8[idx[i]];
            w *= rules.w8[idx[i]];
        }
        s8 += w * f(t);
        int k = 0;
        while (k < d && ++idx[k] == 8) idx[k++] = 0;
        if (k == d) break;
    }
    p.value = vol * s16;
    // |16-rule - 8-rule| estimates the 8-rule error; the 16-rule is far more
    // accurate once the panel resolves the integrand, so scale the gauge down
    // nonlinearly in that regime (same device as the classic QUADPACK rules)
    const double raw = std::fabs(vol * (s16 - s8));
    const double scale = std::fabs(p.value) + raw + 1e-300;
    p.err = raw <= scale ? raw * std::sqrt(raw / scale) : raw;
}

}  // namespace quad

// Adaptive tensor-product Gauss-Legendre cubature over a box, d <= 3.
// Panels are bisected along their widest axis, worst-error-first; the final
// sum runs over leaves in a fixed lexicographic order with compensated
// accumulation, so results do not depend on processing order.
template <typename F>
double integrate_box(const F& f, const nd_box& box, const quadrature_spec& spec) {
    spec.validate();
    const int d = box.dim();
    if (d < 1 || d > 3) throw dimension_too_large("integrate_box: d must be 1..3");

    std::vector<quad::nd_panel> panels;
    // start from a 2-per-axis split so the error probe sees structure
    std::vector<int> idx(d, 0);
    for (;;) {
        quad::nd_panel p;
        p.lo.resize(d);
        p.hi.resize(d);
        for (int i = 0; i < d; ++i) {
            const double mid = 0.5 * (box.lo[i] + box.hi[i]);
            p.lo[i] = idx[i] == 0 ? box.lo[i] : mid;
            p.hi[i] = idx[i] == 0 ? mid : box.hi[i];
        }
        quad::eval_panel(f, p);
        panels.push_back(std::move(p));
        int k = 0;
        while (k < d && ++idx[k] == 2) idx[k++] = 0;
        if (k == d) break;
    }

    // Batch refinement rounds: each round splits the panels carrying the bulk
    // of the error gauge. Terminate on the gauge itself or, once the gauge
    // saturates at its pessimism floor, on stability of successive estimates.
    double prev_total = 0.0;
    int stable_rounds = 0;
    for (int round = 0;; ++round) {
        double total = 0.0, esum = 0.0;
        for (const auto& p : panels) {
            total += p.value;
            esum += p.err;
        }
        const double target = std::max(spec.rel_tol * std::fabs(total), 1e-305);
        if (esum <= target) break;
        if (round > 0 &&
            std::fabs(total - prev_total) <= 0.2 * spec.rel_tol * std::fabs(total))
            ++stable_rounds;
        else
            stable_rounds = 0;
        if (stable_rounds >= 2 && esum <= 1e4 * target) break;
        prev_total = total;

        std::vector<size_t> order(panels.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return panels[a].err > panels[b].err;
        });
        double covered = 0.0;
        size_t take = 0;
        while (take < order.size() && covered < 0.9 * esum)
            covered += panels[order[take++]].err;
        take = std::max<size_t>(take, 1);

        if (static_cast<int>(panels.size() + take) > spec.max_panels)
            throw no_convergence("integrate_box: panel budget exhausted");

        std::vector<quad::nd_panel> next;
        next.reserve(panels.size() + take);
        std::vector<bool> split(panels.size(), false);
        for (size_t i = 0; i < take; ++i) split[order[i]] = true;
        for (size_t i = 0; i < panels.size(); ++i) {
            if (!split[i]) {
                next.push_back(std::move(panels[i]));
                continue;
            }
            quad::nd_panel cur = std::move(panels[i]);
            int axis = 0;
            for (int k = 1; k < d; ++k)
                if (cur.hi[k] - cur.lo[k] > cur.hi[axis] - cur.lo[axis]) axis = k;
            const double mid = 0.5 * (cur.lo[axis] + cur.hi[axis]);
            quad::nd_panel left = cur, right = cur;
            left.hi[axis] = mid;
            right.lo[axis] = mid;
            quad::eval_panel(f, left);
            quad::eval_panel(f, right);
            next.push_back(std::move(left));
            next.push_back(std::move(right));
        }
        panels = std::move(next);
    }

    std::sort(panels.begin(), panels.end(),
              [](const quad::nd_panel& a, const quad::nd_panel& b) {
                  return a.lo < b.lo;
              });
    quad::kahan_sum s;
    for (const auto& p : panels) s.add(p.value);
    return s.value();
}

}  // namespace lapbounds
