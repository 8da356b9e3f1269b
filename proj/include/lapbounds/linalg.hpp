#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lapbounds/errors.hpp"

namespace lapbounds {

// Dense symmetric d x d matrix, row-major. Dimensions here are small
// (d <= ~10), so everything below favors robustness over speed.
class sym_matrix {
public:
    sym_matrix(int d, std::vector<double> entries) : d_(d), a_(std::move(entries)) {
        if (d_ < 1) throw invalid_input("sym_matrix: d must be >= 1");
        if (a_.size() != static_cast<size_t>(d_) * d_)
            throw invalid_input("sym_matrix: entry count does not match dimension");
        double scale = 0.0;
        for (double v : a_) scale = std::max(scale, std::fabs(v));
        const double tol = 1e-12 * std::max(scale, 1.0);
        for (int i = 0; i < d_; ++i)
            for (int j = i + 1; j < d_; ++j) {
                if (std::fabs(a_[idx(i, j)] - a_[idx(j, i)]) > tol)
                    throw invalid_input("sym_matrix: input is not symmetric");
                const double m = 0.5 * (a_[idx(i, j)] + a_[idx(j, i)]);
                a_[idx(i, j)] = a_[idx(j, i)] = m;
            }
    }

    static sym_matrix identity(int d) {
        std::vector<double> e(static_cast<size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i) e[static_cast<size_t>(i) * d + i] = 1.0;
        return sym_matrix(d, std::move(e));
    }

    static sym_matrix diagonal(const std::vector<double>& diag) {
        const int d = static_cast<int>(diag.size());
        std::vector<double> e(static_cast<size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i) e[static_cast<size_t>(i) * d + i] = diag[i];
        return sym_matrix(d, std::move(e));
    }

    int dim() const { return d_; }
    double operator()(int i, int j) const { return a_[idx(i, j)]; }
    const std::vector<double>& entries() const { return a_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::fabs(v));
        return m;
    }

private:
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * d_ + j; }
    int d_;
    std::vector<double> a_;
};

// Upper-triangular Cholesky factor U with positive diagonal, H = U'U.
inline std::vector<double> cholesky_upper(const sym_matrix& h) {
    const int d = h.dim();
    std::vector<double> u(static_cast<size_t>(d) * d, 0.0);
    auto at = [&](int i, int j) -> double& { return u[static_cast<size_t>(i) * d + j]; };
    for (int j = 0; j < d; ++j) {
        double s = h(j, j);
        for (int k = 0; k < j; ++k) s -= at(k, j) * at(k, j);
        if (!(s > 0.0)) throw not_positive_definite("cholesky_upper: pivot <= 0");
        at(j, j) = std::sqrt(s);
        for (int i = j + 1; i < d; ++i) {
            double t = h(j, i);
            for (int k = 0; k < j; ++k) t -= at(k, j) * at(k, i);
            at(j, i) = t / at(j, j);
        }
    }
    return u;
}

// det H via the Cholesky factor: product of squared diagonal entries.
inline double determinant(const sym_matrix& h) {
    const auto u = cholesky_upper(h);
    const int d = h.dim();
    double det = 1.0;
    for (int i = 0; i < d; ++i) {
        const double uii = u[static_cast<size_t>(i) * d + i];
        det *= uii * uii;
    }
    return det;
}

// All eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
// Convergence: off-diagonal Frobenius norm below 1e-14 * ||H||_F.
inline std::vector<double> jacobi_eigenvalues(const sym_matrix& h) {
    const int d = h.dim();
    std::vector<double> a = h.entries();
    auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * d + j]; };

    double norm = 0.0;
    for (double v : a) norm += v * v;
    norm = std::sqrt(norm);
    const double target = 1e-14 * std::max(norm, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += 2.0 * at(i, j) * at(i, j);
        if (std::sqrt(off) < target) break;

        for (int p = 0; p < d - 1; ++p)
            for (int q = p + 1; q < d; ++q) {
                if (at(p, q) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * at(p, q), at(q, q) - at(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                const double app = c * c * at(p, p) + s * s * at(q, q) - 2.0 * s * c * at(p, q);
                const double aqq = s * s * at(p, p) + c * c * at(q, q) + 2.0 * s * c * at(p, q);
                at(p, p) = app;
                at(q, q) = aqq;
                at(p, q) = at(q, p) = 0.0;
                for (int r = 0; r < d; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = at(r, p), arq = at(r, q);
                    at(r, p) = at(p, r) = c * arp - s * arq;
                    at(r, q) = at(q, r) = s * arp + c * arq;
                }
            }
    }
    std::vector<double> ev(d);
    for (int i = 0; i < d; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline double min_eigenvalue(const sym_matrix& h) { return jacobi_eigenvalues(h).front(); }

// Fully symmetric d x d x d tensor of third-order partial derivatives.
// The constructor symmetrizes over all index permutations and rejects inputs
// whose asymmetry exceeds 1e-10 relative to the largest entry.
class third_tensor {
public:
    third_tensor(int d, std::vector<double> entries) : d_(d), a_(std::move(entries)) {
        if (d_ < 1) throw invalid_input("third_tensor: d must be >= 1");
        if (a_.size() != static_cast<size_t>(d_) * d_ * d_)
            throw invalid_input("third_tensor: entry count does not match dimension");
        double scale = 0.0;
        for (double v : a_) scale = std::max(scale, std::fabs(v));
        const double tol = 1e-10 * std::max(scale, 1.0);
        for (int i = 0; i < d_; ++i)
            for (int j = i; j < d_; ++j)
                for (int k = j; k < d_; ++k) {
                    const int per[6][3] = {{i, j, k}, {i, k, j}, {j, i, k},
                                           {j, k, i}, {k, i, j}, {k, j, i}};
                    double mean = 0.0;
                    for (auto& p : per) mean += a_[idx(p[0], p[1], p[2])];
                    mean /= 6.0;
                    for (auto& p : per) {
                        if (std::fabs(a_[idx(p[0], p[1], p[2])] - mean) > tol)
                            throw invalid_input("third_tensor: entries are not symmetric");
                        a_[idx(p[0], p[1], p[2])] = mean;
                    }
                }
    }

    static third_tensor zero(int d) {
        return third_tensor(d, std::vector<double>(static_cast<size_t>(d) * d * d, 0.0));
    }

    int dim() const { return d_; }
    double operator()(int i, int j, int k) const { return a_[idx(i, j, k)]; }
    const std::vector<double>& entries() const { return a_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::fabs(v));
        return m;
    }

private:
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * d_ + j) * d_ + k;
    }
    int d_;
    std::vector<double> a_;
};

// Triple contraction sum_{ijk} T_ijk t_i t_j t_k.
inline double d3f_eval(const third_tensor& t3, const std::vector<double>& t) {
    const int d = t3.dim();
    if (static_cast<int>(t.size()) != d)
        throw invalid_input("d3f_eval: vector dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        double si = 0.0;
        for (int j = 0; j < d; ++j) {
            double sij = 0.0;
            for (int k = 0; k < d; ++k) sij += t3(i, j, k) * t[k];
            si += sij * t[j];
        }
        s += si * t[i];
    }
    return s;
}

// D = (d^{3/2}/6) max_{ijk} |T_ijk|, the cubic-term envelope constant.
inline double d_constant(const third_tensor& t3) {
    const double d = static_cast<double>(t3.dim());
    return std::pow(d, 1.5) / 6.0 * t3.max_abs();
}

}  // namespace lapbounds
