#pragma once

// Maximum-minimum-slack linear program
//
//     maximize t  subject to  G a + o <= -t,  |a_i| <= U,  t <= t_cap
//
// solved through its dual, a standard-form program with k+1 equality rows:
//
//     minimize  -o.y + U 1.(u+ + u-) + t_cap w
//     subject to G^T y + u+ - u- = 0,  1.y + w = 1,  y, u+, u-, w >= 0.
//
// The simplex multipliers of the optimal dual basis are exactly (a, t).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "stoverify/error.hpp"

namespace stoverify {

struct SlackLpResult {
    std::vector<double> a;
    double t = 0.0;  // minimum slack actually attained by a on the rows
    std::size_t iterations = 0;
    bool optimal = false;
};

struct SlackLpOptions {
    double coefficient_bound = 1e4;
    double slack_cap = 1.0;
    std::size_t max_iterations = 200000;
};

namespace detail {

// Gauss-Jordan inverse with partial pivoting; false when singular.
inline bool invert(std::vector<double>& m, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(m[r * n + c]) > std::fabs(m[p * n + c])) p = r;
        if (std::fabs(m[p * n + c]) < 1e-14) return false;
        if (p != c)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m[p * n + j], m[c * n + j]);
                std::swap(inv[p * n + j], inv[c * n + j]);
            }
        const double d = m[c * n + c];
        for (std::size_t j = 0; j < n; ++j) {
            m[c * n + j] /= d;
            inv[c * n + j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = m[r * n + c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m[r * n + j] -= f * m[c * n + j];
                inv[r * n + j] -= f * inv[c * n + j];
            }
        }
    }
    m.swap(inv);
    return true;
}

}  // namespace detail

// G is row-major with `rows` rows of length k.
inline SlackLpResult max_min_slack(const std::vector<double>& G, const std::vector<double>& o, std::size_t k,
                                   const SlackLpOptions& opts = {}) {
    const std::size_t m = o.size();
    if (G.size() != m * k) throw Error("slack LP: row matrix has the wrong size");
    const std::size_t R = k + 1;
    const std::size_t ncols = m + 2 * k + 1;
    const double U = opts.coefficient_bound;
    if (m == 0) {
        SlackLpResult r;
        r.a.assign(k, 0.0);
        r.t = opts.slack_cap;
        r.optimal = true;
        return r;
    }

    auto cost = [&](std::size_t j) -> double {
        if (j < m) return -o[j];
        if (j < m + 2 * k) return U;
        return opts.slack_cap;
    };
    // column j as a dense R-vector
    auto column = [&](std::size_t j, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        if (j < m) {
            for (std::size_t i = 0; i < k; ++i) out[i] = G[j * k + i];
            out[k] = 1.0;
        } else if (j < m + k) {
            out[j - m] = 1.0;
        } else if (j < m + 2 * k) {
            out[j - m - k] = -1.0;
        } else {
            out[k] = 1.0;
        }
    };
    auto dot_column = [&](std::size_t j, const std::vector<double>& pi) -> double {
        if (j < m) {
            double s = pi[k];
            const double* g = &G[j * k];
            for (std::size_t i = 0; i < k; ++i) s += pi[i] * g[i];
            return s;
        }
        if (j < m + k) return pi[j - m];
        if (j < m + 2 * k) return -pi[j - m - k];
        return pi[k];
    };

    std::vector<std::size_t> basis(R);
    std::vector<char> in_basis(ncols, 0);
    for (std::size_t i = 0; i < k; ++i) basis[i] = m + i;
    basis[k] = m + 2 * k;
    for (auto j : basis) in_basis[j] = 1;
    std::vector<double> binv(R * R, 0.0);
    for (std::size_t i = 0; i < R; ++i) binv[i * R + i] = 1.0;
    std::vector<double> xb(R, 0.0);
    xb[k] = 1.0;

    std::vector<double> pi(R), u(R), col(R);
    auto refactor = [&]() {
        std::vector<double> b(R * R);
        for (std::size_t c = 0; c < R; ++c) {
            column(basis[c], col);
            for (std::size_t r = 0; r < R; ++r) b[r * R + c] = col[r];
        }
        if (!detail::invert(b, R)) return false;
        binv.swap(b);
        for (std::size_t r = 0; r < R; ++r) xb[r] = std::max(0.0, binv[r * R + k]);
        return true;
    };

    SlackLpResult res;
    std::size_t degenerate_run = 0;
    const double dj_tol = 1e-11, piv_tol = 1e-10;
    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (res.iterations && res.iterations % 64 == 0 && !refactor()) break;
        for (std::size_t c = 0; c < R; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < R; ++r) s += cost(basis[r]) * binv[r * R + c];
            pi[c] = s;
        }
        const bool bland = degenerate_run > 40;
        std::size_t enter = ncols;
        double best = -dj_tol;
        for (std::size_t j = 0; j < ncols; ++j) {
            if (in_basis[j]) continue;
            const double cj = cost(j);
            const double d = cj - dot_column(j, pi);
            if (d < -dj_tol * (1.0 + std::fabs(cj))) {
                if (bland) {
                    enter = j;
                    break;
                }
                if (d < best) {
                    best = d;
                    enter = j;
                }
            }
        }
        if (enter == ncols) {
            res.optimal = true;
            break;
        }
        column(enter, col);
        for (std::size_t r = 0; r < R; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < R; ++c) s += binv[r * R + c] * col[c];
            u[r] = s;
        }
        std::size_t leave = R;
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < R; ++r) {
            if (u[r] <= piv_tol) continue;
            const double q = xb[r] / u[r];
            if (q < theta - 1e-15 || (q <= theta + 1e-15 && leave < R && basis[r] < basis[leave])) {
                theta = q;
                leave = r;
            }
        }
        if (leave == R) break;  // unbounded dual: cannot happen for this program
        degenerate_run = theta <= 1e-15 ? degenerate_run + 1 : 0;
        for (std::size_t r = 0; r < R; ++r) xb[r] = std::max(0.0, xb[r] - theta * u[r]);
        xb[leave] = theta;
        const double p = u[leave];
        for (std::size_t c = 0; c < R; ++c) binv[leave * R + c] /= p;
        for (std::size_t r = 0; r < R; ++r) {
            if (r == leave || u[r] == 0.0) continue;
            const double f = u[r];
            for (std::size_t c = 0; c < R; ++c) binv[r * R + c] -= f * binv[leave * R + c];
        }
        in_basis[basis[leave]] = 0;
        basis[leave] = enter;
        in_basis[enter] = 1;
    }

    for (std::size_t c = 0; c < R; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < R; ++r) s += cost(basis[r]) * binv[r * R + c];
        pi[c] = s;
    }
    res.a.assign(pi.begin(), pi.begin() + static_cast<std::ptrdiff_t>(k));
    for (auto& v : res.a) v = std::clamp(v, -U, U);
    double t = opts.slack_cap;
    for (std::size_t s = 0; s < m; ++s) {
        double g = o[s];
        for (std::size_t i = 0; i < k; ++i) g += G[s * k + i] * res.a[i];
        t = std::min(t, -g);
    }
    res.t = t;
    return res;
}

}  // namespace stoverify
