#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lapbounds/json_io.hpp"
#include "lapbounds/problems.hpp"

using namespace lapbounds;

namespace {

std::vector<double> random_point_in_ball(int d, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> t(d);
    double norm2 = 0.0;
    for (auto& v : t) {
        v = g(rng);
        norm2 += v * v;
    }
    const double scale = radius * std::pow(u(rng), 1.0 / d) / std::sqrt(norm2);
    for (auto& v : t) v *= scale;
    return t;
}

// |f - t'Ht/2 - d3f/6| <= C ||t||^{2+alpha} at sampled points of B_r
void check_cubic_model(const problem& p, int samples, uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        const auto t = random_point_in_ball(p.local.d, p.local.r, rng);
        double quad = 0.0, norm2 = 0.0;
        for (int a = 0; a < p.local.d; ++a) {
            norm2 += t[a] * t[a];
            for (int b = 0; b < p.local.d; ++b) quad += t[a] * p.local.H(a, b) * t[b];
        }
        const double model = 0.5 * quad + d3f_eval(p.local.T3, t) / 6.0;
        const double resid = std::fabs(p.f_eval(t) - model);
        const double budget =
            p.local.C * std::pow(norm2, 0.5 * (2.0 + p.local.alpha)) + 1e-14;
        CHECK(resid <= budget);
    }
}

}  // namespace

TEST_CASE("separable cubic problem") {
    const auto p = separable_cubic(2, 0.5);

    CHECK(p.local.alpha == doctest::Approx(1.5));
    CHECK(p.local.C == 1.0);
    CHECK(p.local.lambda_min() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.local.D() == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-13));
    CHECK(p.local.r == doctest::Approx(0.25));
    CHECK(p.local.delta == p.local.r);
    CHECK(p.local.Delta > 0.0);
    CHECK(p.exponent_scale == 1.0);
    CHECK(p.hook == problem::oracle_hook::separable_1d);

    CHECK(p.f_eval({0.0, 0.0}) == 0.0);
    CHECK(p.f_eval({0.1, -0.2}) ==
          doctest::Approx(0.01 + 0.001 + std::pow(0.1, 3.5) + 0.04 - 0.008 +
                          std::pow(0.2, 3.5))
              .epsilon(1e-13));

    check_cubic_model(p, 1000, 2024);

    CHECK_THROWS_AS(separable_cubic(1, 0.5), invalid_input);
    CHECK_THROWS_AS(separable_cubic(2, 0.0), invalid_input);
    CHECK_THROWS_AS(separable_cubic(2, 1.0), invalid_input);
    CHECK_THROWS_AS(separable_cubic(2, 0.5, 5.0), invalid_input);  // gap would be negative

    // higher dimension shrinks the default radius until the gap is positive
    const auto p3 = separable_cubic(3, 0.3);
    CHECK(p3.local.Delta > 0.0);
    CHECK(p3.local.r < 0.25);
}

TEST_CASE("dixon exponent problem, d = 2") {
    const auto p = dixon_exponent({2, 1.0 / 3.0});
    const double ahat = M_PI / 6.0;

    CHECK(p.local.lambda_min() == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(p.local.det_H() == doctest::Approx(3.0 * 16.0 / 9.0).epsilon(1e-12));
    CHECK(p.exponent_scale == 2.0);
    CHECK(p.local.alpha == 2.0);
    CHECK(p.local.r == doctest::Approx((1.0 / 3.0) * std::sqrt(2.0) * ahat));
    CHECK(p.local.I_n1 == doctest::Approx(3.0 * M_PI * M_PI / 16.0).epsilon(1e-14));

    // third-derivative pattern: zero on the diagonal, -2 sec^3 sin off it
    const double off = -2.0 * std::sin(ahat) / std::pow(std::cos(ahat), 3.0);
    CHECK(p.local.T3(0, 0, 0) == 0.0);
    CHECK(p.local.T3(1, 1, 1) == 0.0);
    CHECK(p.local.T3(0, 0, 1) == doctest::Approx(off));
    CHECK(p.local.T3(0, 1, 1) == doctest::Approx(off));

    // remainder constant from the formula, evaluated independently here
    auto u = [](double t) {
        return (1.0 + 2.0 * std::pow(std::sin(t), 2)) / std::pow(std::cos(t), 4);
    };
    const double C_expect =
        (4.0 / 12.0) * (u((2.0 / 3.0 + 1.0) * ahat) +
                        u((std::sqrt(2.0) / 3.0 + 1.0) * ahat));
    CHECK(p.local.C == doctest::Approx(C_expect).epsilon(1e-13));
    CHECK(p.local.C == doctest::Approx(6.7197).epsilon(2e-4));
    CHECK(p.local.Delta > 0.0);

    check_cubic_model(p, 1000, 77);
}

TEST_CASE("dixon exponent rejects an infeasible ball size") {
    try {
        dixon_exponent({2, 0.36});
        FAIL("expected delta_nonpositive");
    } catch (const delta_nonpositive& e) {
        // largest feasible eta for d = 2 under the recipe with C = C(eta)
        CHECK(e.eta_max == doctest::Approx(0.3466).epsilon(0.01));
    }
    CHECK_NOTHROW(dixon_exponent({2, 0.34}));
    CHECK_THROWS_AS(dixon_exponent({2, 1.5}), invalid_input);
    CHECK_THROWS_AS(dixon_exponent({1, 0.2}), invalid_input);
}

TEST_CASE("dixon exponent convexity on the ball") {
    const auto p = dixon_exponent({3, 0.2});
    std::mt19937_64 rng(99);
    const double h = 1e-4;
    const int d = 3;
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_point_in_ball(d, p.local.delta * 0.98, rng);
        std::vector<double> hess(static_cast<size_t>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                auto shift = [&](double si, double sj) {
                    auto t = c;
                    t[i] += si;
                    t[j] += sj;
                    return p.f_eval(t);
                };
                const double val =
                    i == j ? (shift(h, 0.0) - 2.0 * p.f_eval(c) + shift(-h, 0.0)) / (h * h)
                           : (shift(h, h) - shift(h, -h) - shift(-h, h) + shift(-h, -h)) /
                                 (4.0 * h * h);
                hess[static_cast<size_t>(i) * d + j] = val;
            }
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                const double m = 0.5 * (hess[static_cast<size_t>(i) * d + j] +
                                        hess[static_cast<size_t>(j) * d + i]);
                hess[static_cast<size_t>(i) * d + j] = m;
                hess[static_cast<size_t>(j) * d + i] = m;
            }
        CHECK(min_eigenvalue(sym_matrix(d, hess)) > 0.0);
    }
}

TEST_CASE("transformed d = 2 problem") {
    const auto p = dixon2_transformed();

    CHECK(p.local.C == doctest::Approx(0.9238).epsilon(5e-4 / 0.9238));
    CHECK(p.local.Delta == doctest::Approx(0.06863).epsilon(5e-4 / 0.06863));
    CHECK(p.local.lambda_min() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.local.det_H() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p.exponent_scale == 2.0);
    CHECK(p.f_eval({0.0, 0.0}) == 0.0);

    // cubic part reproduces (sqrt3/9)(y^3 - 3x^2 y)
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng), y = u(rng);
        const double expect = std::sqrt(3.0) / 9.0 * (y * y * y - 3.0 * x * x * y);
        CHECK(d3f_eval(p.local.T3, {x, y}) / 6.0 ==
              doctest::Approx(expect).epsilon(1e-12));
    }

    // tensor cross-validated against finite differences of f_eval
    const double h = 1e-3;
    auto f = [&](double x, double y) { return p.f_eval({x, y}); };
    const double fd_yyy =
        (f(0, 2 * h) - 2.0 * f(0, h) + 2.0 * f(0, -h) - f(0, -2 * h)) / (2.0 * h * h * h);
    CHECK(fd_yyy == doctest::Approx(p.local.T3(1, 1, 1)).epsilon(1e-5));
    const double fd_xxy =
        ((f(h, h) - 2.0 * f(0, h) + f(-h, h)) - (f(h, -h) - 2.0 * f(0, -h) + f(-h, -h))) /
        (2.0 * h * h * h);
    CHECK(fd_xxy == doctest::Approx(p.local.T3(0, 0, 1)).epsilon(1e-5));

    check_cubic_model(p, 1000, 31337);

    CHECK_THROWS_AS(dixon2_transformed(M_PI / 3.0), invalid_input);
    CHECK_THROWS_AS(dixon2_transformed(-0.1), invalid_input);
}

TEST_CASE("exact alternating sums") {
    SUBCASE("s = 1 vanishes") {
        for (int n = 1; n <= 20; ++n) CHECK(dixon_sum_exact(1, n).sign() == 0);
    }

    SUBCASE("s = 2 collapses to the central binomial coefficient") {
        for (int n = 1; n <= 10; ++n) {
            const auto row = binomial_row(2 * n);
            CHECK(dixon_sum_exact(2, n) == row[n]);
        }
    }

    SUBCASE("s = 3 matches (3n)!/(n!)^3 (the closed form)") {
        auto factorial = [](int m) {
            __int128 f = 1;
            for (int i = 2; i <= m; ++i) f *= i;
            return f;
        };
        for (int n = 1; n <= 11; ++n) {
            __int128 expect = factorial(3 * n) / factorial(n) / factorial(n) / factorial(n);
            std::string es;
            __int128 v = expect;
            while (v > 0) {
                es.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
                v /= 10;
            }
            std::reverse(es.begin(), es.end());
            CHECK(dixon_sum_exact(3, n).to_decimal() == es);
        }
    }

    SUBCASE("hand values") {
        CHECK(dixon_sum_exact(3, 1).to_decimal() == "6");
        CHECK(dixon_sum_exact(4, 1).to_decimal() == "14");
    }

    SUBCASE("s = 3 values are positive and divisible by 6 up to n = 30") {
        for (int n = 1; n <= 30; ++n) {
            const auto s = dixon_sum_exact(3, n);
            CHECK(s.sign() > 0);
            CHECK(s.mod_u32(6) == 0);
        }
    }

    SUBCASE("dual summation order agrees") {
        // recompute S(3,10) with k descending and separate accumulators
        const int n = 10;
        const auto row = binomial_row(2 * n);
        bigint pos, neg;
        for (int k = 2 * n; k >= 0; --k) {
            const bigint cube = row[k] * row[k] * row[k];
            if ((k + n) % 2 == 0)
                pos += cube;
            else
                neg += cube;
        }
        CHECK(pos - neg == dixon_sum_exact(3, n));
    }

    SUBCASE("domain") {
        CHECK_THROWS_AS(dixon_sum_exact(0, 1), invalid_input);
        CHECK_THROWS_AS(dixon_sum_exact(3, 0), invalid_input);
    }
}

TEST_CASE("leading-order approximation of the sums") {
    SUBCASE("d = 2, n = 1 equals log(3^3.5 / (2 pi))") {
        CHECK(dixon_leading_log(2, 1.0) ==
              doctest::Approx(3.5 * std::log(3.0) - std::log(2.0 * M_PI)).epsilon(1e-14));
    }

    SUBCASE("general assembly collapses to 3^{3n+1/2}/(2 pi n) for d = 2") {
        for (int n = 1; n <= 20; ++n) {
            const double direct =
                (3.0 * n + 0.5) * std::log(3.0) - std::log(2.0 * M_PI * n);
            CHECK(dixon_leading_log(2, n) == doctest::Approx(direct).epsilon(1e-10));
        }
    }

    SUBCASE("log leading plus (d/2) log n is affine in n") {
        for (int d : {2, 3}) {
            auto affine_part = [d](double n) {
                return dixon_leading_log(d, n) + 0.5 * d * std::log(n);
            };
            const double second_diff =
                affine_part(3.0) - 2.0 * affine_part(2.0) + affine_part(1.0);
            CHECK(std::fabs(second_diff) < 1e-10);
        }
    }

    SUBCASE("sum-to-leading gap shrinks as n grows") {
        auto gap = [](int n) {
            return std::fabs(dixon_sum_exact(3, n).log_abs() - dixon_leading_log(2, n));
        };
        CHECK(gap(40) < gap(10));
        CHECK(gap(10) < gap(2));
    }
}

TEST_CASE("problem selectors") {
    const auto sep = parse_problem_selector("separable-cubic:d=2,gamma=0.5");
    CHECK(sep.local.d == 2);
    CHECK(sep.gamma == doctest::Approx(0.5));

    const auto dx = parse_problem_selector("dixon:d=3,eta=0.2");
    CHECK(dx.local.d == 3);
    CHECK(dx.exponent_scale == 2.0);

    const auto d2 = parse_problem_selector("dixon2:r2=pi2/108");
    CHECK(d2.local.r == doctest::Approx(M_PI / std::sqrt(108.0)).epsilon(1e-14));
    CHECK(d2.local.C == doctest::Approx(0.9238).epsilon(1e-3));

    const auto d2b = parse_problem_selector("dixon2");
    CHECK(d2b.local.r == doctest::Approx(d2.local.r));

    CHECK_THROWS_AS(parse_problem_selector("unknown:x=1"), invalid_input);
    CHECK_THROWS_AS(parse_problem_selector("dixon:d"), invalid_input);
    CHECK_THROWS_AS(parse_problem_selector("dixon:d=zzz"), invalid_input);
}

TEST_CASE("local expansion JSON round-trip") {
    const auto p = dixon2_transformed();
    const std::string text = local_expansion_to_json(p.local);
    const auto back = local_expansion_from_json_text(text);
    CHECK(back.d == p.local.d);
    CHECK(back.C == p.local.C);
    CHECK(back.alpha == p.local.alpha);
    CHECK(back.r == p.local.r);
    CHECK(back.delta == p.local.delta);
    CHECK(back.Delta == p.local.Delta);
    CHECK(back.n1 == p.local.n1);
    CHECK(back.I_n1 == p.local.I_n1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(back.H(i, j) == p.local.H(i, j));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) CHECK(back.T3(i, j, k) == p.local.T3(i, j, k));

    CHECK_THROWS_AS(local_expansion_from_json_text("{\"d\": 2}"), invalid_input);
}
