#pragma once

// Multivariate polynomials with exact rational coefficients over x1..xn.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stoverify/error.hpp"
#include "stoverify/interval.hpp"

namespace stoverify {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Exact value of a finite double.
inline Rational to_rational(double v) {
    if (!std::isfinite(v)) throw Error("cannot represent a non-finite value exactly");
    if (v == 0.0) return Rational(0);
    int e = 0;
    const double m = std::frexp(v, &e);
    BigInt mant(static_cast<long long>(std::ldexp(m, 53)));
    e -= 53;
    Rational r(mant);
    if (e > 0) r *= Rational(BigInt(1) << e);
    if (e < 0) r /= Rational(BigInt(1) << (-e));
    return r;
}

// Exponent vector; index i is the power of x_{i+1}. Trailing zeros are trimmed.
using Monomial = std::vector<unsigned>;

inline unsigned total_degree(const Monomial& m) {
    unsigned d = 0;
    for (unsigned e : m) d += e;
    return d;
}

// Graded lexicographic order with x1 > x2 > ... within a degree.
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const unsigned da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        const std::size_t n = std::max(a.size(), b.size());
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned ea = i < a.size() ? a[i] : 0, eb = i < b.size() ? b[i] : 0;
            if (ea != eb) return ea < eb;
        }
        return false;
    }
};

inline void trim(Monomial& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
}

inline Monomial monomial_product(const Monomial& a, const Monomial& b) {
    Monomial r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

class Polynomial {
public:
    using Terms = std::map<Monomial, Rational, GradedLex>;

    Polynomial() = default;
    Polynomial(int c) : Polynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)
    Polynomial(const Rational& c) {                  // NOLINT(google-explicit-constructor)
        if (c != 0) terms_[Monomial{}] = c;
    }

    static Polynomial constant(const Rational& c) { return Polynomial(c); }

    // x_{i+1}
    static Polynomial variable(std::size_t i) {
        Monomial m(i + 1, 0);
        m[i] = 1;
        return term(m, 1);
    }

    static Polynomial term(Monomial m, const Rational& c) {
        trim(m);
        Polynomial p;
        if (c != 0) p.terms_[m] = c;
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

    Rational coefficient(Monomial m) const {
        trim(m);
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational constant_term() const { return coefficient({}); }

    unsigned degree() const { return terms_.empty() ? 0 : total_degree(terms_.rbegin()->first); }

    // Number of variables actually mentioned (highest index used).
    std::size_t num_vars() const {
        std::size_t n = 0;
        for (const auto& [m, c] : terms_) n = std::max(n, m.size());
        return n;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) {
        for (auto& [m, c] : a.terms_) c = -c;
        return a;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(monomial_product(ma, mb), ca * cb);
        return r;
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    Polynomial pow(unsigned e) const {
        Polynomial r(1), base = *this;
        while (e) {
            if (e & 1u) r *= base;
            e >>= 1u;
            if (e) base *= base;
        }
        return r;
    }

    // Partial derivative in x_{var+1}.
    Polynomial derivative(std::size_t var) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            if (var >= m.size() || m[var] == 0) continue;
            Monomial d = m;
            const unsigned e = d[var]--;
            trim(d);
            r.add_term(d, c * e);
        }
        return r;
    }

    Rational evaluate_exact(std::span<const Rational> x) const {
        Rational s = 0;
        for (const auto& [m, c] : terms_) {
            Rational t = c;
            for (std::size_t i = 0; i < m.size(); ++i)
                for (unsigned k = 0; k < m[i]; ++k) t *= at(x, i);
            s += t;
        }
        return s;
    }

    double evaluate(std::span<const double> x) const {
        double s = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = to_double(c);
            for (std::size_t i = 0; i < m.size(); ++i)
                for (unsigned k = 0; k < m[i]; ++k) t *= at(x, i);
            s += t;
        }
        return s;
    }

    Interval evaluate(std::span<const Interval> box) const {
        Interval s(0.0);
        for (const auto& [m, c] : terms_) {
            Interval t = coefficient_interval(c);
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) t = t * stoverify::pow(at(box, i), m[i]);
            s = s + t;
        }
        return s;
    }

    // Replace each x_i by the polynomial subs[i].
    Polynomial compose(const std::vector<Polynomial>& subs) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            Polynomial t(c);
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) t *= at(std::span<const Polynomial>(subs), i).pow(m[i]);
            r += t;
        }
        return r;
    }

private:
    template <class T>
    static const T& at(std::span<const T> x, std::size_t i) {
        if (i >= x.size()) throw DimensionMismatch("polynomial uses x" + std::to_string(i + 1) +
                                                   " but the point has dimension " + std::to_string(x.size()));
        return x[i];
    }

    static Interval coefficient_interval(const Rational& c) {
        const double d = to_double(c);
        if (to_rational(d) == c) return Interval(d);
        return {detail::down(d), detail::up(d)};
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Terms terms_;
};

inline Polynomial operator*(const Rational& s, const Polynomial& p) { return Polynomial(s) * p; }

inline std::string to_string(const Rational& r) {
    return denominator(r) == 1 ? numerator(r).str() : numerator(r).str() + "/" + denominator(r).str();
}

inline std::string monomial_string(const Monomial& m) {
    std::string s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) continue;
        if (!s.empty()) s += '*';
        s += "x" + std::to_string(i + 1);
        if (m[i] > 1) s += "^" + std::to_string(m[i]);
    }
    return s;
}

// Highest degree first, e.g. "x1^2 + 2*x1*x2 - 5/2".
inline std::string to_string(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        const bool neg = c < 0;
        const Rational a = neg ? Rational(-c) : c;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        if (m.empty())
            s += to_string(a);
        else if (a == 1)
            s += monomial_string(m);
        else
            s += to_string(a) + "*" + monomial_string(m);
    }
    return s;
}

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view text, std::size_t max_vars) : text_(text), max_vars_(max_vars) {}

    Polynomial parse() {
        skip_ws();
        if (pos_ == text_.size()) throw SyntaxError("empty polynomial", pos_);
        Polynomial p = expr();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return p;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr() {
        Polynomial p = product();
        for (;;) {
            if (eat('+'))
                p += product();
            else if (eat('-'))
                p -= product();
            else
                return p;
        }
    }

    Polynomial product() {
        Polynomial p = unary();
        for (;;) {
            if (eat('*')) {
                p *= unary();
            } else if (eat('/')) {
                const std::size_t at = pos_;
                const Polynomial d = unary();
                if (!d.is_constant()) throw SyntaxError("division by a non-constant expression", at);
                if (d.is_zero()) throw SyntaxError("division by zero", at);
                p *= Polynomial(Rational(1) / d.constant_term());
            } else {
                return p;
            }
        }
    }

    Polynomial unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Polynomial power() {
        Polynomial base = atom();
        if (!eat('^')) return base;
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) throw SyntaxError("expected a non-negative integer exponent", start);
        if (pos_ - start > 3) throw SyntaxError("exponent too large", start);
        return base.pow(static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start)))));
    }

    Polynomial atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of polynomial", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial p = expr();
            if (!eat(')')) throw SyntaxError("expected ')'", pos_);
            return p;
        }
        if (c == 'x') return variable();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    Polynomial variable() {
        const std::size_t start = pos_++;
        const std::size_t digits = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (digits == pos_) throw SyntaxError("expected a variable index after 'x'", digits);
        const unsigned long idx = std::stoul(std::string(text_.substr(digits, pos_ - digits)));
        if (idx == 0) throw SyntaxError("variables are numbered from x1", start);
        if (max_vars_ && idx > max_vars_)
            throw DimensionMismatch("variable x" + std::to_string(idx) + " exceeds dimension " +
                                    std::to_string(max_vars_));
        return Polynomial::variable(idx - 1);
    }

    Polynomial number() {
        const std::size_t start = pos_;
        BigInt mant = 0;
        int scale = 0;
        bool any = false, dot = false;
        for (; pos_ < text_.size(); ++pos_) {
            const char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                mant = mant * 10 + (c - '0');
                if (dot) --scale;
                any = true;
            } else if (c == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
        }
        if (!any) throw SyntaxError("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            int sign = 1;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) sign = text_[pos_++] == '-' ? -1 : 1;
            const std::size_t e0 = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (e0 == pos_ || pos_ - e0 > 3) throw SyntaxError("malformed exponent", e0);
            scale += sign * std::stoi(std::string(text_.substr(e0, pos_ - e0)));
        }
        Rational r(mant);
        const BigInt ten = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(scale)));
        if (scale > 0) r *= Rational(ten);
        if (scale < 0) r /= Rational(ten);
        return Polynomial(r);
    }

    std::string_view text_;
    std::size_t max_vars_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// max_vars = 0 accepts any variable index.
inline Polynomial parse_polynomial(std::string_view text, std::size_t max_vars = 0) {
    return detail::PolyParser(text, max_vars).parse();
}

// Double-coefficient form for hot evaluation loops.
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const Polynomial& p) {
        for (const auto& [m, c] : p.terms()) {
            coef_.push_back(to_double(c));
            offsets_.push_back(static_cast<unsigned>(factors_.size()));
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) factors_.push_back({static_cast<unsigned>(i), m[i]});
            nvars_ = std::max(nvars_, m.size());
        }
        offsets_.push_back(static_cast<unsigned>(factors_.size()));
    }

    std::size_t num_vars() const { return nvars_; }
    bool is_zero() const { return coef_.empty(); }

    double operator()(const double* x) const {
        double s = 0.0;
        for (std::size_t t = 0; t < coef_.size(); ++t) {
            double v = coef_[t];
            for (unsigned f = offsets_[t]; f < offsets_[t + 1]; ++f) {
                const double xi = x[factors_[f].var];
                for (unsigned k = 0; k < factors_[f].exp; ++k) v *= xi;
            }
            s += v;
        }
        return s;
    }
    double operator()(std::span<const double> x) const {
        if (x.size() < nvars_) throw DimensionMismatch("point dimension too small for polynomial");
        return (*this)(x.data());
    }

private:
    struct Factor {
        unsigned var, exp;
    };
    std::vector<double> coef_;
    std::vector<unsigned> offsets_;
    std::vector<Factor> factors_;
    std::size_t nvars_ = 0;
};


// Rigorous interval form: each coefficient is enclosed by a double interval.
class IntervalPolynomial {
public:
    IntervalPolynomial() = default;
    explicit IntervalPolynomial(const Polynomial& p) {
        for (const auto& [m, c] : p.terms()) {
            const double d = to_double(c);
            coef_.push_back(to_rational(d) == c ? Interval(d) : Interval(detail::down(d), detail::up(d)));
            exps_.push_back(m);
        }
    }

    Interval operator()(std::span<const Interval> box) const {
        Interval s(0.0);
        for (std::size_t t = 0; t < coef_.size(); ++t) {
            Interval v = coef_[t];
            for (std::size_t i = 0; i < exps_[t].size(); ++i)
                if (exps_[t][i]) v = v * stoverify::pow(box[i], exps_[t][i]);
            s = s + v;
        }
        return s;
    }

    // Rigorous upper bound at a single point.
    double upper_at(std::span<const double> x) const {
        Interval s(0.0);
        for (std::size_t t = 0; t < coef_.size(); ++t) {
            Interval v = coef_[t];
            for (std::size_t i = 0; i < exps_[t].size(); ++i)
                for (unsigned k = 0; k < exps_[t][i]; ++k) v = v * Interval(x[i]);
            s = s + v;
        }
        return s.hi;
    }

private:
    std::vector<Interval> coef_;
    std::vector<Monomial> exps_;
};

}  // namespace stoverify
