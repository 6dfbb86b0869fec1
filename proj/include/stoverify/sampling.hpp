#pragma once

// Deterministic point sets: Halton sequences and samples of semi-algebraic sets.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "stoverify/system.hpp"

namespace stoverify {

inline double radical_inverse(std::size_t index, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index) {
        r += static_cast<double>(index % base) * f;
        index /= base;
        f *= inv;
    }
    return r;
}

// Point `index` (starting at 1) of the Halton sequence in [0,1)^n.
inline std::vector<double> halton(std::size_t index, std::size_t n) {
    static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (n > std::size(primes)) throw Error("Halton sequence supports at most 16 dimensions");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = radical_inverse(index, primes[i]);
    return x;
}

inline bool cell_contains(const Cell& cell, std::span<const double> x, double tol = 0.0) {
    for (const auto& h : cell)
        if (!(h.evaluate(x) <= tol)) return false;
    return true;
}

// Sub-boxes of a uniform partition of `box` that may meet the cell.
inline std::vector<Box> candidate_boxes(const Cell& cell, const Box& box, std::size_t per_axis) {
    std::vector<Box> out;
    Box unit = box;
    for (std::size_t i = 0; i < box.dimension(); ++i) {
        unit.lower[i] = 0;
        unit.upper[i] = static_cast<double>(per_axis - 1);
    }
    for (const auto& idx : box_grid(unit, per_axis, 1u << 20)) {
        Box b = box;
        std::vector<Interval> iv;
        for (std::size_t i = 0; i < box.dimension(); ++i) {
            const double w = (box.upper[i] - box.lower[i]) / static_cast<double>(per_axis);
            b.lower[i] = box.lower[i] + w * idx[i];
            b.upper[i] = idx[i] + 1 == per_axis ? box.upper[i] : box.lower[i] + w * (idx[i] + 1);
            iv.emplace_back(b.lower[i], b.upper[i]);
        }
        bool possible = true;
        for (const auto& h : cell)
            if (h.evaluate(std::span<const Interval>(iv)).lo > 0.0) {
                possible = false;
                break;
            }
        if (possible) out.push_back(std::move(b));
    }
    return out;
}

namespace detail {

// Pull x toward the cell by Newton steps on the most violated constraint.
inline bool project_onto_cell(const Cell& cell, const Box& box, std::vector<double>& x, double tol) {
    const std::size_t n = x.size();
    for (int it = 0; it < 60; ++it) {
        double worst = tol;
        const Polynomial* h = nullptr;
        for (const auto& c : cell) {
            const double v = c.evaluate(x);
            if (v > worst) {
                worst = v;
                h = &c;
            }
        }
        if (!h) return true;
        std::vector<double> g(n);
        double g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = h->derivative(i).evaluate(x);
            g2 += g[i] * g[i];
        }
        if (g2 < 1e-300) return false;
        for (std::size_t i = 0; i < n; ++i) x[i] -= worst * g[i] / g2;
        box.clamp(x);
    }
    return cell_contains(cell, x, tol);
}

}  // namespace detail

// Up to `count` distinct points of the cell inside the box, deterministic.
inline std::vector<std::vector<double>> sample_cell(const Cell& cell, const Box& box, std::size_t count) {
    const std::size_t n = box.dimension();
    const std::size_t per_axis = n == 1 ? 256 : n == 2 ? 48 : n == 3 ? 12 : 4;
    const auto boxes = candidate_boxes(cell, box, per_axis);
    std::set<std::vector<double>> seen;
    std::vector<std::vector<double>> out;
    if (boxes.empty()) return out;
    std::vector<std::vector<double>> rejected;
    const std::size_t tries = 40 * count;
    for (std::size_t j = 1; j <= tries && out.size() < count; ++j) {
        const Box& b = boxes[(j * 7919) % boxes.size()];
        auto u = halton(j, n);
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b.lower[i] + u[i] * (b.upper[i] - b.lower[i]);
        if (cell_contains(cell, x)) {
            if (seen.insert(x).second) out.push_back(std::move(x));
        } else if (rejected.size() < 4 * count) {
            rejected.push_back(std::move(x));
        }
    }
    // thin sets (e.g. equalities) are reached by projection
    for (auto& x : rejected) {
        if (out.size() >= count) break;
        if (detail::project_onto_cell(cell, box, x, 1e-12) && seen.insert(x).second) out.push_back(x);
    }
    return out;
}

inline std::vector<std::vector<double>> sample_box(const Box& box, std::size_t count) {
    std::vector<std::vector<double>> out;
    for (std::size_t j = 1; j <= count; ++j) {
        auto u = halton(j, box.dimension());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = box.lower[i] + u[i] * (box.upper[i] - box.lower[i]);
        out.push_back(std::move(u));
    }
    return out;
}

inline std::vector<std::vector<double>> sample_predicate(const Predicate& p, const Box& box, std::size_t count) {
    std::vector<std::vector<double>> out;
    if (p.cells.empty()) return out;
    const std::size_t per_cell = std::max<std::size_t>(1, (count + p.cells.size() - 1) / p.cells.size());
    for (const auto& cell : p.cells) {
        auto pts = cell.empty() ? sample_box(box, per_cell) : sample_cell(cell, box, per_cell);
        for (auto& x : pts) out.push_back(std::move(x));
    }
    return out;
}

}  // namespace stoverify
