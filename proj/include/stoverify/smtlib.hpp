#pragma once

// SMT-LIB v2 export over nonlinear real arithmetic: the counterexample query
// for a fixed candidate, and the quantified template for its coefficients.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stoverify/generator.hpp"
#include "stoverify/synthesis.hpp"

namespace stoverify {

inline std::string smt_rational(const Rational& r) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    const BigInt num = numerator(r), den = denominator(r);
    const BigInt mag = num < 0 ? BigInt(-num) : num;
    std::string s = den == 1 ? mag.str() + ".0" : "(/ " + mag.str() + ".0 " + den.str() + ".0)";
    return num < 0 ? "(- " + s + ")" : s;
}

inline std::string smt_term(const Polynomial& p) {
    if (p.is_zero()) return "0.0";
    std::vector<std::string> terms;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        std::vector<std::string> f;
        if (c != 1 || m.empty()) f.push_back(smt_rational(c));
        for (std::size_t i = 0; i < m.size(); ++i)
            for (unsigned k = 0; k < m[i]; ++k) f.push_back("x" + std::to_string(i + 1));
        if (f.size() == 1) {
            terms.push_back(f[0]);
        } else {
            std::string t = "(*";
            for (const auto& s : f) t += ' ' + s;
            terms.push_back(t + ')');
        }
    }
    if (terms.size() == 1) return terms[0];
    std::string s = "(+";
    for (const auto& t : terms) s += ' ' + t;
    return s + ')';
}

inline std::string smt_predicate(const Predicate& p) {
    std::vector<std::string> cells;
    for (const auto& c : p.cells) {
        if (c.empty()) return "true";
        std::string s = c.size() > 1 ? "(and" : "";
        for (const auto& h : c) s += (c.size() > 1 ? " " : "") + ("(<= " + smt_term(h) + " 0.0)");
        cells.push_back(c.size() > 1 ? s + ')' : s);
    }
    if (cells.empty()) return "false";
    if (cells.size() == 1) return cells[0];
    std::string s = "(or";
    for (const auto& c : cells) s += ' ' + c;
    return s + ')';
}

namespace detail {

inline std::string smt_box(const Box& b) {
    std::string s = "(and";
    for (std::size_t i = 0; i < b.dimension(); ++i) {
        const std::string x = "x" + std::to_string(i + 1);
        s += " (<= " + smt_rational(to_rational(b.lower[i])) + ' ' + x + ") (<= " + x + ' ' +
             smt_rational(to_rational(b.upper[i])) + ')';
    }
    return s + ')';
}

inline std::string smt_header(const SwitchedSystem& sys, const char* what) {
    std::ostringstream out;
    out << "; " << what << "\n(set-logic ALL)\n(set-option :produce-models true)\n";
    for (std::size_t i = 0; i < sys.dimension; ++i) out << "(declare-fun x" << i + 1 << " () Real)\n";
    return out.str();
}

inline std::vector<Polynomial> mode_generators(const std::vector<Polynomial>& b, const SwitchedSystem& sys,
                                               CertificateKind kind) {
    std::vector<Polynomial> out;
    for (std::size_t m = 0; m < sys.modes.size(); ++m) {
        if (kind == CertificateKind::Common) {
            out.push_back(apply_generator(b.at(0), sys.modes[m]));
        } else {
            if (!sys.rates) throw MissingRates("multiple certificates need switching rates");
            out.push_back(apply_generator_multi(b, m, sys.modes, *sys.rates));
        }
    }
    return out;
}

}  // namespace detail

// Satisfiable exactly when the fixed candidate violates one of its conditions
// somewhere in the state space.
inline std::string smtlib_check(const BarrierCertificate& cert, const ReachSpec& spec, const SwitchedSystem& sys) {
    std::vector<Polynomial> b;
    for (const auto& cb : cert.barriers) b.push_back(cb.polynomial());
    if (b.empty()) throw InputError("certificate has no barrier");
    const auto gens = detail::mode_generators(b, sys, cert.kind);
    const std::string gamma = smt_rational(to_rational(cert.gamma)), c = smt_rational(to_rational(cert.c));

    std::ostringstream out;
    out << detail::smt_header(sys, "counterexample query for a fixed barrier candidate");
    out << "(define-fun in_X () Bool " << detail::smt_box(spec.domain) << ")\n";
    out << "(define-fun in_X0 () Bool " << smt_predicate(spec.source) << ")\n";
    out << "(define-fun in_X1 () Bool " << smt_predicate(spec.target) << ")\n";
    for (std::size_t q = 0; q < b.size(); ++q) out << "(define-fun B" << q + 1 << " () Real " << smt_term(b[q]) << ")\n";
    for (std::size_t m = 0; m < gens.size(); ++m)
        out << "(define-fun DB_" << sys.modes[m].id << " () Real " << smt_term(gens[m]) << ")\n";

    std::vector<std::string> nonneg, initial, unsafe, gen;
    for (std::size_t q = 0; q < b.size(); ++q) {
        const std::string B = "B" + std::to_string(q + 1);
        nonneg.push_back("(< " + B + " 0.0)");
        initial.push_back("(and in_X0 (> " + B + ' ' + gamma + "))");
        unsafe.push_back("(and in_X1 (< " + B + " 1.0))");
    }
    for (const auto& m : sys.modes) gen.push_back("(> DB_" + m.id + ' ' + c + ')');
    auto group = [&](const char* name, const std::vector<std::string>& parts) {
        out << "; " << name << "\n(define-fun violates_" << name << " () Bool ";
        if (parts.size() == 1) {
            out << parts[0];
        } else {
            out << "(or";
            for (const auto& p : parts) out << ' ' << p;
            out << ')';
        }
        out << ")\n";
    };
    group("nonnegative", nonneg);
    group("initial", initial);
    group("unsafe", unsafe);
    group("generator", gen);
    out << "(assert in_X)\n"
        << "(assert (or violates_nonnegative violates_initial violates_unsafe violates_generator))\n"
        << "(check-sat)\n(get-model)\n";
    return out.str();
}

// Existence of coefficients making the template a barrier certificate.
inline std::string smtlib_synthesis(const ReachSpec& spec, const SwitchedSystem& sys, const std::vector<BasisSet>& bases,
                                    CertificateKind kind, double gamma, double c) {
    if (bases.empty()) throw InputError("need at least one basis");
    if (kind == CertificateKind::Multiple && bases.size() != sys.modes.size())
        throw MissingMode("multiple certificates need one basis per mode");
    std::ostringstream out;
    out << "; coefficient template for a barrier certificate\n(set-logic ALL)\n(set-option :produce-models true)\n";
    auto coef = [](std::size_t q, std::size_t i) { return "a" + std::to_string(q + 1) + '_' + std::to_string(i + 1); };
    for (std::size_t q = 0; q < bases.size(); ++q)
        for (std::size_t i = 0; i < bases[q].size(); ++i) out << "(declare-fun " << coef(q, i) << " () Real)\n";

    // B_q and generators as linear combinations of basis images
    auto combo = [&](std::size_t q, auto&& image) {
        std::string s = "(+";
        for (std::size_t i = 0; i < bases[q].size(); ++i) s += " (* " + coef(q, i) + ' ' + smt_term(image(bases[q][i])) + ')';
        return bases[q].empty() ? std::string("0.0") : s + ')';
    };
    auto ident = [](const Polynomial& p) { return p; };
    std::vector<std::string> B, gens;
    for (std::size_t q = 0; q < bases.size(); ++q) B.push_back(combo(q, ident));
    for (std::size_t m = 0; m < sys.modes.size(); ++m) {
        const std::size_t own = kind == CertificateKind::Common ? 0 : m;
        std::string g = combo(own, [&](const Polynomial& p) { return apply_generator(p, sys.modes[m]); });
        if (kind == CertificateKind::Multiple) {
            if (!sys.rates) throw MissingRates("multiple certificates need switching rates");
            std::string coupling;
            for (std::size_t q = 0; q < sys.modes.size(); ++q) {
                const auto& lam = (*sys.rates)[m][q];
                if (lam.is_zero()) continue;
                coupling += " (* " + smt_term(lam) + ' ' + B[q] + ')';
            }
            if (!coupling.empty()) g = "(+ " + g + coupling + ')';
        }
        gens.push_back(g);
    }
    std::string vars = "(";
    for (std::size_t i = 0; i < sys.dimension; ++i) vars += (i ? " " : "") + ("(x" + std::to_string(i + 1) + " Real)");
    vars += ')';
    const std::string X = detail::smt_box(spec.domain);
    auto forall = [&](const std::string& pre, const std::string& body) {
        out << "(assert (forall " << vars << " (=> " << pre << ' ' << body << ")))\n";
    };
    const std::string g = smt_rational(to_rational(gamma)), cc = smt_rational(to_rational(c));
    out << "; nonnegative\n";
    for (const auto& b : B) forall(X, "(>= " + b + " 0.0)");
    out << "; initial\n";
    for (const auto& b : B) forall("(and " + X + ' ' + smt_predicate(spec.source) + ')', "(<= " + b + ' ' + g + ')');
    out << "; unsafe\n";
    for (const auto& b : B) forall("(and " + X + ' ' + smt_predicate(spec.target) + ')', "(>= " + b + " 1.0)");
    out << "; generator\n";
    for (const auto& d : gens) forall(X, "(<= " + d + ' ' + cc + ')');
    out << "(check-sat)\n(get-model)\n";
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << content;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace stoverify
