#pragma once

// Safe-LTL over finite traces: AST, concrete syntax, positive normal form
// and finite-trace semantics.
//
// Grammar (lowest to highest precedence):
//   or     := and ('|' and)*
//   and    := until ('&' until)*
//   until  := unary ('U' until)?          right associative
//   unary  := '!' unary | 'G' unary | 'F' unary | atom
//   atom   := 'true' | 'false' | identifier | '(' or ')'
// 'X' (next) is recognised only to be rejected.

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stoverify/error.hpp"

namespace stoverify {

enum class FormulaKind { True, False, Atom, Not, And, Or, Always, Eventually, Until };

class Formula {
public:
    static Formula truth() { return Formula(make(FormulaKind::True)); }
    static Formula falsity() { return Formula(make(FormulaKind::False)); }
    static Formula atom(std::string name) {
        if (name.empty()) throw InputError("proposition name must be nonempty");
        auto n = make(FormulaKind::Atom);
        n->name = std::move(name);
        return Formula(std::move(n));
    }
    static Formula negation(Formula f) { return unary(FormulaKind::Not, std::move(f)); }
    static Formula always(Formula f) { return unary(FormulaKind::Always, std::move(f)); }
    static Formula eventually(Formula f) { return unary(FormulaKind::Eventually, std::move(f)); }
    static Formula conj(Formula a, Formula b) { return binary(FormulaKind::And, std::move(a), std::move(b)); }
    static Formula disj(Formula a, Formula b) { return binary(FormulaKind::Or, std::move(a), std::move(b)); }
    static Formula until(Formula a, Formula b) { return binary(FormulaKind::Until, std::move(a), std::move(b)); }

    FormulaKind kind() const { return node_->kind; }
    const std::string& name() const { return node_->name; }
    // Operand of unary nodes; left operand of binary nodes.
    Formula left() const { return Formula(node_->lhs); }
    Formula right() const { return Formula(node_->rhs); }
    Formula child() const { return Formula(node_->lhs); }

    bool is_unary() const {
        auto k = kind();
        return k == FormulaKind::Not || k == FormulaKind::Always || k == FormulaKind::Eventually;
    }
    bool is_binary() const {
        auto k = kind();
        return k == FormulaKind::And || k == FormulaKind::Or || k == FormulaKind::Until;
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind()) return false;
        switch (a.kind()) {
            case FormulaKind::True:
            case FormulaKind::False: return true;
            case FormulaKind::Atom: return a.name() == b.name();
            default: break;
        }
        if (a.is_unary()) return a.child() == b.child();
        return a.left() == b.left() && a.right() == b.right();
    }

private:
    struct Node {
        FormulaKind kind;
        std::string name;
        std::shared_ptr<const Node> lhs, rhs;
    };

    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static std::shared_ptr<Node> make(FormulaKind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }
    static Formula unary(FormulaKind k, Formula f) {
        auto n = make(k);
        n->lhs = f.node_;
        return Formula(std::move(n));
    }
    static Formula binary(FormulaKind k, Formula a, Formula b) {
        auto n = make(k);
        n->lhs = a.node_;
        n->rhs = b.node_;
        return Formula(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(FormulaKind k) {
    switch (k) {
        case FormulaKind::Or: return 1;
        case FormulaKind::And: return 2;
        case FormulaKind::Until: return 3;
        case FormulaKind::Not:
        case FormulaKind::Always:
        case FormulaKind::Eventually: return 4;
        default: return 5;
    }
}

inline void print(const Formula& f, std::string& out);

inline void print_operand(const Formula& f, bool parens, std::string& out) {
    if (parens) out += '(';
    print(f, out);
    if (parens) out += ')';
}

inline void print(const Formula& f, std::string& out) {
    switch (f.kind()) {
        case FormulaKind::True: out += "true"; return;
        case FormulaKind::False: out += "false"; return;
        case FormulaKind::Atom: out += f.name(); return;
        case FormulaKind::Not:
        case FormulaKind::Always:
        case FormulaKind::Eventually: {
            out += f.kind() == FormulaKind::Not ? "!" : (f.kind() == FormulaKind::Always ? "G " : "F ");
            print_operand(f.child(), f.child().is_binary(), out);
            return;
        }
        default: break;
    }
    const int p = precedence(f.kind());
    const bool right_assoc = f.kind() == FormulaKind::Until;
    const int lp = precedence(f.left().kind());
    const int rp = precedence(f.right().kind());
    print_operand(f.left(), lp < p || (right_assoc && lp == p), out);
    out += f.kind() == FormulaKind::And ? " & " : (f.kind() == FormulaKind::Or ? " | " : " U ");
    print_operand(f.right(), rp < p || (!right_assoc && rp == p), out);
}

}  // namespace detail

inline std::string to_string(const Formula& f) {
    std::string out;
    detail::print(f, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class FormulaParser {
public:
    explicit FormulaParser(std::string_view text) : text_(text) {}

    Formula parse() {
        skip_ws();
        if (pos_ == text_.size()) throw SyntaxError("empty formula", pos_);
        Formula f = parse_or();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return f;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    // Identifier at the cursor without consuming it.
    std::string_view peek_ident() const {
        if (pos_ >= text_.size() || !ident_start(text_[pos_])) return {};
        std::size_t end = pos_;
        while (end < text_.size() && ident_char(text_[end])) ++end;
        return text_.substr(pos_, end - pos_);
    }

    Formula parse_or() {
        Formula f = parse_and();
        for (;;) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '|') {
                ++pos_;
                f = Formula::disj(f, parse_and());
            } else {
                return f;
            }
        }
    }

    Formula parse_and() {
        Formula f = parse_until();
        for (;;) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '&') {
                ++pos_;
                f = Formula::conj(f, parse_until());
            } else {
                return f;
            }
        }
    }

    Formula parse_until() {
        Formula f = parse_unary();
        skip_ws();
        if (peek_ident() == "U") {
            ++pos_;
            return Formula::until(f, parse_until());
        }
        return f;
    }

    Formula parse_unary() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of formula", pos_);
        if (text_[pos_] == '!') {
            ++pos_;
            return Formula::negation(parse_unary());
        }
        const auto id = peek_ident();
        if (id == "G" || id == "F") {
            ++pos_;
            Formula operand = parse_unary();
            return id == "G" ? Formula::always(operand) : Formula::eventually(operand);
        }
        if (id == "X") throw UnsupportedOperator("next operator 'X' is not part of the safe fragment");
        return parse_primary();
    }

    Formula parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of formula", pos_);
        if (text_[pos_] == '(') {
            ++pos_;
            Formula f = parse_or();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')') throw SyntaxError("expected ')'", pos_);
            ++pos_;
            return f;
        }
        const auto id = peek_ident();
        if (id.empty()) throw SyntaxError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
        if (id == "U") throw SyntaxError("'U' needs a left operand", pos_);
        pos_ += id.size();
        if (id == "true") return Formula::truth();
        if (id == "false") return Formula::falsity();
        return Formula::atom(std::string(id));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

// ---------------------------------------------------------------------------
// Normal forms and syntactic queries

namespace detail {

inline Formula pnf(const Formula& f, bool negated) {
    switch (f.kind()) {
        case FormulaKind::True: return negated ? Formula::falsity() : Formula::truth();
        case FormulaKind::False: return negated ? Formula::truth() : Formula::falsity();
        case FormulaKind::Atom: return negated ? Formula::negation(f) : f;
        case FormulaKind::Not: return pnf(f.child(), !negated);
        case FormulaKind::And:
            return negated ? Formula::disj(pnf(f.left(), true), pnf(f.right(), true))
                           : Formula::conj(pnf(f.left(), false), pnf(f.right(), false));
        case FormulaKind::Or:
            return negated ? Formula::conj(pnf(f.left(), true), pnf(f.right(), true))
                           : Formula::disj(pnf(f.left(), false), pnf(f.right(), false));
        case FormulaKind::Always:
            return negated ? Formula::eventually(pnf(f.child(), true)) : Formula::always(pnf(f.child(), false));
        case FormulaKind::Eventually:
            return negated ? Formula::always(pnf(f.child(), true)) : Formula::eventually(pnf(f.child(), false));
        case FormulaKind::Until: {
            if (!negated) return Formula::until(pnf(f.left(), false), pnf(f.right(), false));
            // !(a U b) == G !b | (!b U (!a & !b))
            Formula na = pnf(f.left(), true);
            Formula nb = pnf(f.right(), true);
            return Formula::disj(Formula::always(nb), Formula::until(nb, Formula::conj(na, nb)));
        }
    }
    return f;
}

}  // namespace detail

// Negations pushed down to atoms; semantically equivalent to f.
inline Formula to_pnf(const Formula& f) { return detail::pnf(f, false); }

// Positive normal form of !f.
inline Formula negate_to_pnf(const Formula& f) { return detail::pnf(f, true); }

inline bool is_safe_fragment(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom: return true;
        case FormulaKind::Not: return f.child().kind() == FormulaKind::Atom;
        case FormulaKind::And:
        case FormulaKind::Or: return is_safe_fragment(f.left()) && is_safe_fragment(f.right());
        case FormulaKind::Always: return is_safe_fragment(f.child());
        case FormulaKind::Eventually:
        case FormulaKind::Until: return false;
    }
    return false;
}

inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
    if (f.kind() == FormulaKind::Atom) {
        out.insert(f.name());
    } else if (f.is_unary()) {
        collect_atoms(f.child(), out);
    } else if (f.is_binary()) {
        collect_atoms(f.left(), out);
        collect_atoms(f.right(), out);
    }
}

inline std::set<std::string> atoms(const Formula& f) {
    std::set<std::string> out;
    collect_atoms(f, out);
    return out;
}

// ---------------------------------------------------------------------------
// Finite words and semantics

// Nonempty sequence of single propositions.
class FiniteWord {
public:
    FiniteWord(std::vector<std::string> letters) : letters_(std::move(letters)) {
        if (letters_.empty()) throw InputError("finite words must be nonempty");
    }
    FiniteWord(std::initializer_list<std::string> letters) : FiniteWord(std::vector<std::string>(letters)) {}

    const std::vector<std::string>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    const std::string& operator[](std::size_t i) const { return letters_[i]; }

private:
    std::vector<std::string> letters_;
};

namespace detail {

// Truth values of f at positions 0..n-1 of the word.
inline std::vector<char> eval_positions(const Formula& f, const std::vector<std::string>& w) {
    const std::size_t n = w.size();
    std::vector<char> out(n);
    switch (f.kind()) {
        case FormulaKind::True: std::fill(out.begin(), out.end(), 1); break;
        case FormulaKind::False: break;
        case FormulaKind::Atom:
            for (std::size_t i = 0; i < n; ++i) out[i] = w[i] == f.name();
            break;
        case FormulaKind::Not: {
            auto c = eval_positions(f.child(), w);
            for (std::size_t i = 0; i < n; ++i) out[i] = !c[i];
            break;
        }
        case FormulaKind::And:
        case FormulaKind::Or: {
            auto a = eval_positions(f.left(), w);
            auto b = eval_positions(f.right(), w);
            const bool is_and = f.kind() == FormulaKind::And;
            for (std::size_t i = 0; i < n; ++i) out[i] = is_and ? (a[i] && b[i]) : (a[i] || b[i]);
            break;
        }
        case FormulaKind::Always: {
            auto c = eval_positions(f.child(), w);
            bool acc = true;  // vacuously true past the end
            for (std::size_t i = n; i-- > 0;) out[i] = acc = acc && c[i];
            break;
        }
        case FormulaKind::Eventually: {
            auto c = eval_positions(f.child(), w);
            bool acc = false;
            for (std::size_t i = n; i-- > 0;) out[i] = acc = acc || c[i];
            break;
        }
        case FormulaKind::Until: {
            auto a = eval_positions(f.left(), w);
            auto b = eval_positions(f.right(), w);
            bool acc = false;
            for (std::size_t i = n; i-- > 0;) out[i] = acc = b[i] || (a[i] && acc);
            break;
        }
    }
    return out;
}

}  // namespace detail

// Finite-trace semantics at position 0. Letters outside the formula's atoms
// are permitted; they simply satisfy no atom of f.
inline bool evaluate_word(const Formula& f, const FiniteWord& w) {
    return detail::eval_positions(f, w.letters())[0] != 0;
}

// As above, but every letter must belong to the given proposition set.
inline bool evaluate_word(const Formula& f, const FiniteWord& w, const std::set<std::string>& alphabet) {
    for (const auto& l : w.letters()) {
        if (!alphabet.count(l)) throw UnknownProposition("letter '" + l + "' is not a known proposition");
    }
    for (const auto& a : atoms(f)) {
        if (!alphabet.count(a)) throw UnknownProposition("formula atom '" + a + "' is not a known proposition");
    }
    return evaluate_word(f, w);
}

}  // namespace stoverify
