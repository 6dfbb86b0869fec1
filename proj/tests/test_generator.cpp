#include <gtest/gtest.h>

#include "stoverify/generator.hpp"

using namespace stoverify;

namespace {

Polynomial P(const char* s) { return parse_polynomial(s); }

Mode mode(std::vector<const char*> f, std::vector<std::vector<const char*>> g) {
    Mode m;
    m.id = "m";
    for (auto* s : f) m.drift.push_back(P(s));
    for (auto& row : g) {
        std::vector<Polynomial> r;
        for (auto* s : row) r.push_back(P(s));
        m.diffusion.push_back(r);
    }
    return m;
}

}  // namespace

TEST(Gradient, Examples) {
    EXPECT_EQ(gradient(P("x1^2"), 2), (std::vector<Polynomial>{P("2*x1"), P("0")}));
    EXPECT_EQ(gradient(P("x1*x2"), 2), (std::vector<Polynomial>{P("x2"), P("x1")}));
    EXPECT_EQ(gradient(P("1"), 2), (std::vector<Polynomial>{P("0"), P("0")}));
}

TEST(Hessian, Examples) {
    const auto h = hessian(P("x1^2 + x2^2"), 2);
    EXPECT_EQ(h[0][0], P("2"));
    EXPECT_EQ(h[1][1], P("2"));
    EXPECT_TRUE(h[0][1].is_zero());
    const auto k = hessian(P("x1*x2"), 2);
    EXPECT_EQ(k[0][1], P("1"));
    EXPECT_EQ(k[1][0], P("1"));
    EXPECT_TRUE(k[0][0].is_zero());
    for (const auto& row : hessian(P("3*x1 - x2 + 4"), 2))
        for (const auto& e : row) EXPECT_TRUE(e.is_zero());
}

TEST(ApplyGenerator, HandDerivedCases) {
    EXPECT_EQ(apply_generator(P("x1^2 + x2^2"), mode({"-x1", "-x2"}, {{"1", "0"}, {"0", "1"}})),
              P("-2*x1^2 - 2*x2^2 + 2"));
    const Mode any = mode({"x1*x2 + 3", "x2^3"}, {{"x1", "2"}, {"1", "x2"}});
    EXPECT_EQ(apply_generator(P("x1"), any), P("x1*x2 + 3"));
    EXPECT_EQ(apply_generator(P("x1^2"), mode({"0", "0"}, {{"1", "0"}, {"0", "1"}})), P("1"));
    // state-dependent, non-square diffusion: B = x1*x2, g = [[x2],[1]] gives drift part plus g1*g2 = x2
    EXPECT_EQ(apply_generator(P("x1*x2"), mode({"1", "0"}, {{"x2"}, {"1"}})), P("2*x2"));
}

TEST(ApplyGenerator, DimensionMismatch) {
    EXPECT_THROW(apply_generator(P("x3"), mode({"0", "0"}, {{"1"}, {"1"}})), DimensionMismatch);
    EXPECT_THROW(apply_generator(P("x1"), mode({"0", "0"}, {{"1"}})), DimensionMismatch);
}

TEST(ApplyGenerator, Linearity) {
    const Mode m = mode({"-0.1*x2^2", "-0.1*x1*x2"}, {{"1", "0"}, {"0", "1"}});
    const std::vector<Polynomial> bs = {P("x1^3 - x2"), P("x1^2*x2^2 + 4"), P("(x1 - x2)^4"), P("7")};
    const Rational a(3, 7), b(-5, 2);
    for (const auto& b1 : bs)
        for (const auto& b2 : bs)
            EXPECT_EQ(apply_generator(a * b1 + b * b2, m), a * apply_generator(b1, m) + b * apply_generator(b2, m));
}

TEST(ApplyGeneratorMulti, RateCoupling) {
    const std::vector<Mode> modes = {mode({"0"}, {{"0"}}), mode({"0"}, {{"0"}})};
    const std::vector<std::vector<Polynomial>> lam = {{P("-1"), P("1")}, {P("0"), P("0")}};
    EXPECT_EQ(apply_generator_multi({P("x1^2"), P("0")}, 0, modes, lam), P("-x1^2"));

    const std::vector<Mode> m2 = {mode({"-x1"}, {{"1"}}), mode({"x1"}, {{"2"}})};
    const std::vector<std::vector<Polynomial>> zero = {{P("0"), P("0")}, {P("0"), P("0")}};
    EXPECT_EQ(apply_generator_multi({P("x1^2"), P("x1")}, 0, m2, zero), apply_generator(P("x1^2"), m2[0]));

    const std::vector<std::vector<Polynomial>> valid = {{P("-x1^2"), P("x1^2")}, {P("3"), P("-3")}};
    for (std::size_t m = 0; m < 2; ++m)
        EXPECT_EQ(apply_generator_multi({P("x1^4"), P("x1^4")}, m, m2, valid), apply_generator(P("x1^4"), m2[m]));

    EXPECT_THROW(apply_generator_multi({P("x1")}, 0, m2, valid), MissingMode);
}

TEST(Basis, MonomialCountsAndScaling) {
    EXPECT_EQ(monomial_basis(2, 5).size(), 21u);
    EXPECT_EQ(monomial_basis(1, 4).size(), 5u);
    EXPECT_EQ(monomial_basis(2, 0).front(), P("1"));
    const auto s = scaled_basis(Box{{-8, -8}, {8, 8}}, 2);
    ASSERT_EQ(s.size(), 6u);
    EXPECT_EQ(s[0], P("1"));
    EXPECT_NO_THROW(validate_basis(s));
    EXPECT_THROW(validate_basis({P("x1"), P("x1")}), InputError);
    EXPECT_THROW(validate_basis({P("0")}), InputError);
    const auto t = scaled_basis(Box{{0}, {2}}, 2);
    EXPECT_EQ(t[1], P("x1 - 1"));
    EXPECT_EQ(t[2], P("x1^2 - 2*x1 + 1"));
}

TEST(CandidateBarrier, Polynomial) {
    const CandidateBarrier c{{P("1"), P("x1"), P("x1^2")}, {0.5, 0.0, -2.0}};
    EXPECT_EQ(c.polynomial(), P("1/2 - 2*x1^2"));
    EXPECT_THROW((CandidateBarrier{{P("1")}, {1.0, 2.0}}.polynomial()), DimensionMismatch);
}
