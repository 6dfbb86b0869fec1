#pragma once

// Exact infinitesimal generator of the switched diffusion applied to
// polynomial functions, and polynomial bases for candidate barriers.

#include <set>
#include <string>
#include <vector>

#include "stoverify/polynomial.hpp"
#include "stoverify/system.hpp"

namespace stoverify {

inline std::vector<Polynomial> gradient(const Polynomial& b, std::size_t n) {
    std::vector<Polynomial> g;
    g.reserve(n);
    for (std::size_t j = 0; j < n; ++j) g.push_back(b.derivative(j));
    return g;
}

inline std::vector<std::vector<Polynomial>> hessian(const Polynomial& b, std::size_t n) {
    std::vector<std::vector<Polynomial>> h(n, std::vector<Polynomial>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Polynomial di = b.derivative(i);
        for (std::size_t j = i; j < n; ++j) h[i][j] = h[j][i] = di.derivative(j);
    }
    return h;
}

// (dB/dx) f + 1/2 tr(g^T H g)
inline Polynomial apply_generator(const Polynomial& b, const Mode& mode) {
    const std::size_t n = mode.drift.size();
    if (mode.diffusion.size() != n) throw DimensionMismatch("diffusion must have one row per state variable");
    if (b.num_vars() > n) throw DimensionMismatch("candidate uses more variables than the system has");
    const std::size_t r = n ? mode.diffusion[0].size() : 0;
    Polynomial out;
    const auto grad = gradient(b, n);
    for (std::size_t j = 0; j < n; ++j)
        if (!grad[j].is_zero()) out += grad[j] * mode.drift[j];
    const auto h = hessian(b, n);
    Polynomial second;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (h[i][j].is_zero()) continue;
            Polynomial ggt;  // (g g^T)_{ij}
            for (std::size_t k = 0; k < r; ++k) ggt += mode.diffusion[i][k] * mode.diffusion[j][k];
            if (!ggt.is_zero()) second += h[i][j] * ggt;
        }
    out += Polynomial(Rational(1, 2)) * second;
    return out;
}

// Generator of mode m plus the coupling sum_{m'} lambda_{m m'} B_{m'}.
inline Polynomial apply_generator_multi(const std::vector<Polynomial>& per_mode, std::size_t m,
                                        const std::vector<Mode>& modes,
                                        const std::vector<std::vector<Polynomial>>& rates) {
    if (per_mode.size() != modes.size())
        throw MissingMode("expected one candidate per mode (" + std::to_string(modes.size()) + "), got " +
                          std::to_string(per_mode.size()));
    if (m >= modes.size()) throw MissingMode("mode index out of range");
    if (rates.size() != modes.size() || rates[m].size() != modes.size())
        throw DimensionMismatch("rate matrix does not match the number of modes");
    Polynomial out = apply_generator(per_mode[m], modes[m]);
    for (std::size_t q = 0; q < modes.size(); ++q)
        if (!rates[m][q].is_zero() && !per_mode[q].is_zero()) out += rates[m][q] * per_mode[q];
    return out;
}

// Exponent vectors of all monomials in n variables of total degree <= d, graded order.
inline std::vector<Monomial> monomials_up_to(std::size_t n, unsigned d) {
    std::vector<Monomial> out;
    Monomial cur(n, 0);
    auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
        if (i == n) {
            Monomial m = cur;
            trim(m);
            out.push_back(std::move(m));
            return;
        }
        for (unsigned e = 0; e <= left; ++e) {
            cur[i] = e;
            self(self, i + 1, left - e);
        }
        cur[i] = 0;
    };
    rec(rec, 0, d);
    std::sort(out.begin(), out.end(), GradedLex{});
    return out;
}

using BasisSet = std::vector<Polynomial>;

inline BasisSet monomial_basis(std::size_t n, unsigned d) {
    BasisSet out;
    for (const auto& m : monomials_up_to(n, d)) out.push_back(Polynomial::term(m, 1));
    return out;
}

// Monomials in u_i = (x_i - c_i) / h_i, the box mapped to [-1, 1]^n. Spans the
// same space as monomial_basis but is far better conditioned on large boxes.
inline BasisSet scaled_basis(const Box& box, unsigned d) {
    const std::size_t n = box.dimension();
    std::vector<Polynomial> u;
    for (std::size_t i = 0; i < n; ++i) {
        const Rational lo = to_rational(box.lower[i]), hi = to_rational(box.upper[i]);
        const Rational c = (lo + hi) / 2, h = (hi - lo) / 2;
        u.push_back(Polynomial(Rational(1) / h) * (Polynomial::variable(i) - Polynomial(c)));
    }
    BasisSet out;
    for (const auto& m : monomials_up_to(n, d)) out.push_back(Polynomial::term(m, 1).compose(u));
    return out;
}

// Rejects zero and duplicate members.
inline void validate_basis(const BasisSet& basis) {
    std::set<std::string> seen;
    for (const auto& b : basis) {
        if (b.is_zero()) throw InputError("basis contains the zero polynomial");
        if (!seen.insert(to_string(b)).second) throw InputError("basis contains a duplicate: " + to_string(b));
    }
}

struct CandidateBarrier {
    BasisSet basis;
    std::vector<double> coefficients;

    Polynomial polynomial() const {
        if (basis.size() != coefficients.size()) throw DimensionMismatch("coefficient count differs from basis size");
        Polynomial p;
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (coefficients[i] != 0.0) p += Polynomial(to_rational(coefficients[i])) * basis[i];
        return p;
    }
};

}  // namespace stoverify
