#include <gtest/gtest.h>

#include "formula_corpus.hpp"
#include "stoverify/ltl.hpp"

using namespace stoverify;
using stoverify::testing::for_each_word;
using stoverify::testing::formula_corpus;
using stoverify::testing::holds;

namespace {

const char* kExampleProperty = "(p0 & (G !p1 | G !p2)) | (p2 & G !p1)";
const std::vector<std::string> kPi = {"p0", "p1", "p2", "p3"};

Formula A(const char* n) { return Formula::atom(n); }

}  // namespace

TEST(ParseFormula, ExamplePropertyStructure) {
    const Formula f = parse_formula(kExampleProperty);
    const Formula expected = Formula::disj(
        Formula::conj(A("p0"), Formula::disj(Formula::always(Formula::negation(A("p1"))),
                                             Formula::always(Formula::negation(A("p2"))))),
        Formula::conj(A("p2"), Formula::always(Formula::negation(A("p1")))));
    EXPECT_EQ(f, expected);
}

TEST(ParseFormula, TrueIsIdentity) { EXPECT_EQ(parse_formula("true").kind(), FormulaKind::True); }

TEST(ParseFormula, NextIsRejected) {
    EXPECT_THROW(parse_formula("X p0"), UnsupportedOperator);
    EXPECT_THROW(parse_formula("p1 & X p0"), UnsupportedOperator);
}

TEST(ParseFormula, SyntaxErrorsCarryPosition) {
    try {
        parse_formula("p0 & (p1 | ");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position(), 11u);
    }
    EXPECT_THROW(parse_formula(""), SyntaxError);
    EXPECT_THROW(parse_formula("p0 p1"), SyntaxError);
    EXPECT_THROW(parse_formula("(p0"), SyntaxError);
    EXPECT_THROW(parse_formula("U p1"), SyntaxError);
    EXPECT_THROW(parse_formula("p0 # p1"), SyntaxError);
}

TEST(ParseFormula, PrecedenceUnaryOverUntilOverAndOverOr) {
    EXPECT_EQ(parse_formula("a | b & c"), Formula::disj(A("a"), Formula::conj(A("b"), A("c"))));
    EXPECT_EQ(parse_formula("a & b U c"), Formula::conj(A("a"), Formula::until(A("b"), A("c"))));
    EXPECT_EQ(parse_formula("!a U b"), Formula::until(Formula::negation(A("a")), A("b")));
    EXPECT_EQ(parse_formula("a U b U c"), Formula::until(A("a"), Formula::until(A("b"), A("c"))));
    EXPECT_EQ(parse_formula("G a & b"), Formula::conj(Formula::always(A("a")), A("b")));
}

TEST(ParseFormula, PrintParseRoundTripOverCorpus) {
    for (const auto& text : formula_corpus()) {
        const Formula f = parse_formula(text);
        EXPECT_EQ(parse_formula(to_string(f)), f) << text << " printed as " << to_string(f);
        const Formula n = negate_to_pnf(f);
        EXPECT_EQ(parse_formula(to_string(n)), n) << to_string(n);
    }
}

TEST(NegateToPnf, Dualities) {
    EXPECT_EQ(negate_to_pnf(parse_formula("G !p1")), parse_formula("F p1"));
    EXPECT_EQ(negate_to_pnf(parse_formula("p0")), parse_formula("!p0"));
    EXPECT_EQ(negate_to_pnf(parse_formula("F p1")), parse_formula("G !p1"));
    EXPECT_EQ(negate_to_pnf(parse_formula("true")), Formula::falsity());
}

TEST(NegateToPnf, ExamplePropertyShape) {
    EXPECT_EQ(negate_to_pnf(parse_formula(kExampleProperty)),
              parse_formula("(!p0 | (F p1 & F p2)) & (!p2 | F p1)"));
}

TEST(NegateToPnf, ExamplePropertyEquivalentToNegationOnShortWords) {
    const Formula f = parse_formula(kExampleProperty);
    const Formula n = negate_to_pnf(f);
    std::size_t checked = 0;
    for_each_word(kPi, 4, [&](const auto& w) {
        ASSERT_EQ(holds(n, w, 0), !holds(f, w, 0));
        ++checked;
    });
    EXPECT_EQ(checked, 4u + 16 + 64 + 256);
}

TEST(IsSafeFragment, Examples) {
    EXPECT_TRUE(is_safe_fragment(parse_formula("G !p1")));
    EXPECT_FALSE(is_safe_fragment(parse_formula("F p1")));
    EXPECT_TRUE(is_safe_fragment(parse_formula(kExampleProperty)));
    EXPECT_FALSE(is_safe_fragment(parse_formula("p0 U p1")));
    EXPECT_FALSE(is_safe_fragment(parse_formula("!(p0 & p1)")));
    EXPECT_FALSE(is_safe_fragment(parse_formula("!G p1")));
}

TEST(IsSafeFragment, NegationOfSafeFormulaUsesEventually) {
    const Formula f = parse_formula(kExampleProperty);
    EXPECT_TRUE(is_safe_fragment(f));
    EXPECT_FALSE(is_safe_fragment(negate_to_pnf(f)));
}

TEST(EvaluateWord, Examples) {
    const Formula g = parse_formula("G !p1");
    EXPECT_TRUE(evaluate_word(g, FiniteWord{"p0", "p2", "p3"}));
    EXPECT_FALSE(evaluate_word(g, FiniteWord{"p0", "p1"}));
    const Formula f = parse_formula(kExampleProperty);
    EXPECT_FALSE(evaluate_word(f, FiniteWord{"p2", "p0", "p1"}));
    EXPECT_FALSE(holds(f, {"p2", "p0", "p1"}, 0));
}

TEST(EvaluateWord, UnknownPropositionWithDeclaredAlphabet) {
    const std::set<std::string> pi(kPi.begin(), kPi.end());
    EXPECT_THROW(evaluate_word(parse_formula("G !p1"), FiniteWord{"p0", "p9"}, pi), UnknownProposition);
    EXPECT_THROW(evaluate_word(parse_formula("G !p7"), FiniteWord{"p0"}, pi), UnknownProposition);
    EXPECT_TRUE(evaluate_word(parse_formula("G !p1"), FiniteWord{"p0", "p3"}, pi));
}

TEST(EvaluateWord, EmptyWordRejected) { EXPECT_THROW(FiniteWord(std::vector<std::string>{}), InputError); }

// Exhaustive over |w| <= 5, |Pi| = 4.
TEST(EvaluateWord, AgreesWithReferenceAndNegationIsComplement) {
    for (const auto& text : formula_corpus()) {
        const Formula f = parse_formula(text);
        const Formula n = negate_to_pnf(f);
        const Formula nn = negate_to_pnf(n);
        for_each_word(kPi, 5, [&](const auto& w) {
            const FiniteWord word(w);
            const bool v = evaluate_word(f, word);
            ASSERT_EQ(v, holds(f, w, 0)) << text;
            ASSERT_EQ(evaluate_word(n, word), !v) << text;
            ASSERT_EQ(evaluate_word(nn, word), v) << text;
            ASSERT_EQ(evaluate_word(to_pnf(f), word), v) << text;
        });
    }
}
