#pragma once

// Shared formula corpus and exhaustive word enumeration for semantic tests.

#include <functional>
#include <string>
#include <vector>

#include "stoverify/ltl.hpp"

namespace stoverify::testing {

inline const std::vector<std::string>& formula_corpus() {
    static const std::vector<std::string> corpus = {
        "(p0 & (G !p1 | G !p2)) | (p2 & G !p1)",
        "(!p0 | (F p1 & F p2)) & (!p2 | F p1)",
        "true",
        "false",
        "p0",
        "!p0",
        "G !p1",
        "F p1",
        "G (p0 | p1)",
        "p0 U p1",
        "!(p0 U p1)",
        "(p0 | p2) U (p1 & !p0)",
        "G !p1 & G !p2",
        "G !p1 | G !p2",
        "p0 & G (!p1 | !p2)",
        "F (p1 & F p2)",
        "G (p1 | G !p2)",
        "!G F p3",
        "G F p3",
        "F G p0",
        "p3 U (p0 U p1)",
        "(p0 U p1) U p2",
        "!(p0 & G !p3) | p2 U p1",
        "G (!p0 | G !p1)",
        "p0 & p1",
    };
    return corpus;
}

// Calls fn on every word of length 1..max_len over the alphabet.
inline void for_each_word(const std::vector<std::string>& alphabet, std::size_t max_len,
                          const std::function<void(const std::vector<std::string>&)>& fn) {
    std::vector<std::string> word;
    auto rec = [&](auto&& self) -> void {
        if (!word.empty()) fn(word);
        if (word.size() == max_len) return;
        for (const auto& a : alphabet) {
            word.push_back(a);
            self(self);
            word.pop_back();
        }
    };
    rec(rec);
}

// Reference semantics written directly from the definitions, position by
// position, independent of the library evaluator.
inline bool holds(const Formula& f, const std::vector<std::string>& w, std::size_t i) {
    const std::size_t n = w.size();
    switch (f.kind()) {
        case FormulaKind::True: return true;
        case FormulaKind::False: return false;
        case FormulaKind::Atom: return i < n && w[i] == f.name();
        case FormulaKind::Not: return !holds(f.child(), w, i);
        case FormulaKind::And: return holds(f.left(), w, i) && holds(f.right(), w, i);
        case FormulaKind::Or: return holds(f.left(), w, i) || holds(f.right(), w, i);
        case FormulaKind::Always:
            for (std::size_t j = i; j < n; ++j)
                if (!holds(f.child(), w, j)) return false;
            return true;
        case FormulaKind::Eventually:
            for (std::size_t j = i; j < n; ++j)
                if (holds(f.child(), w, j)) return true;
            return false;
        case FormulaKind::Until:
            for (std::size_t k = i; k < n; ++k) {
                if (holds(f.right(), w, k)) return true;
                if (!holds(f.left(), w, k)) return false;
            }
            return false;
    }
    return false;
}

}  // namespace stoverify::testing
