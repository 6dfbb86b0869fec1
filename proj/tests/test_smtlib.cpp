#include <gtest/gtest.h>

#include <fstream>

#include "stoverify/smtlib.hpp"

using namespace stoverify;

namespace {

std::string fixture(const char* name) { return std::string(STOVERIFY_FIXTURES) + "/" + name; }

bool balanced(const std::string& s) {
    int depth = 0;
    for (char ch : s) {
        if (ch == ';') return depth == 0 ? true : false;
        depth += ch == '(' ? 1 : ch == ')' ? -1 : 0;
        if (depth < 0) return false;
    }
    return depth == 0;
}

bool all_lines_balanced(const std::string& text) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!balanced(line)) return false;
    return true;
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

BarrierCertificate quarter_x_squared() {
    BarrierCertificate cert;
    cert.barriers.push_back(CandidateBarrier{monomial_basis(1, 2), {0.0, 0.0, 0.25}});
    cert.gamma = 0.05;
    cert.c = 0.25;
    cert.horizon = 1;
    return cert;
}

}  // namespace

TEST(SmtTerms, ExactRationals) {
    EXPECT_EQ(smt_rational(Rational(3)), "3.0");
    EXPECT_EQ(smt_rational(Rational(-1, 4)), "(- (/ 1.0 4.0))");
    EXPECT_EQ(smt_term(parse_polynomial("x1^2 - 0.01")), "(+ (* x1 x1) (- (/ 1.0 100.0)))");
    EXPECT_EQ(smt_term(Polynomial()), "0.0");
    EXPECT_EQ(smt_term(parse_polynomial("2*x1*x2")), "(* 2.0 x1 x2)");
}

TEST(SmtCheck, OneDimensionalCandidate) {
    const auto sys = load_system(fixture("brownian_1d.json"));
    const auto spec = make_reach_spec(sys, region_of(sys, {"p0"}), region_of(sys, {"p1"}));
    const auto text = smtlib_check(quarter_x_squared(), spec, sys);
    EXPECT_NE(text.find("(declare-fun x1 () Real)"), std::string::npos);
    for (const char* g : {"violates_nonnegative", "violates_initial", "violates_unsafe", "violates_generator"})
        EXPECT_EQ(count(text, g), 2u) << g;
    EXPECT_NE(text.find("(check-sat)"), std::string::npos);
    EXPECT_NE(text.find("(define-fun DB_w () Real (/ 1.0 4.0))"), std::string::npos);
    EXPECT_TRUE(all_lines_balanced(text));
}

TEST(SmtCheck, MultipleCertificatesIncludeRateCoupling) {
    const auto sys = load_system(fixture("switching_rates.json"));
    const auto spec = make_reach_spec(sys, region_of(sys, {"p0"}), region_of(sys, {"p1"}));
    BarrierCertificate cert;
    cert.kind = CertificateKind::Multiple;
    cert.barriers = {CandidateBarrier{monomial_basis(1, 2), {0, 0, 0.25}}, CandidateBarrier{monomial_basis(1, 2), {0, 0, 0.5}}};
    cert.mode_ids = {"a", "b"};
    const auto text = smtlib_check(cert, spec, sys);
    EXPECT_NE(text.find("define-fun B2"), std::string::npos);
    EXPECT_NE(text.find("DB_a"), std::string::npos);
    EXPECT_NE(text.find("DB_b"), std::string::npos);
    // mode a: -x * x/2 + 0.25*0.25 + (-1)(x^2/4) + 1 (x^2/2) = -0.25 x^2 + 1/16
    EXPECT_NE(text.find("(define-fun DB_a () Real (+ (* (- (/ 1.0 4.0)) x1 x1) (/ 1.0 16.0)))"), std::string::npos);
    EXPECT_TRUE(all_lines_balanced(text));

    const auto synth = smtlib_synthesis(spec, sys, {monomial_basis(1, 2), monomial_basis(1, 2)}, CertificateKind::Multiple,
                                        0.1, 0.2);
    EXPECT_NE(synth.find("(declare-fun a2_3 () Real)"), std::string::npos);
    EXPECT_EQ(count(synth, "(assert (forall"), 8u);
    // coupling terms multiply the rates with the other mode's template
    EXPECT_NE(synth.find("(* (- 1.0) (+ (* a1_1"), std::string::npos);
    EXPECT_NE(synth.find("(* 2.0 (+ (* a1_1"), std::string::npos);
    EXPECT_TRUE(all_lines_balanced(synth));
    EXPECT_THROW(smtlib_synthesis(spec, sys, {monomial_basis(1, 2)}, CertificateKind::Multiple, 0.1, 0.2), MissingMode);
}

TEST(SmtSynthesis, CommonTemplate) {
    const auto sys = load_system(fixture("example_2_11.json"));
    const auto spec = make_reach_spec(sys, region_of(sys, {"p0"}), region_of(sys, {"p1"}));
    const auto text = smtlib_synthesis(spec, sys, {monomial_basis(2, 2)}, CertificateKind::Common, 0.1, 0.01);
    EXPECT_NE(text.find("(declare-fun a1_6 () Real)"), std::string::npos);
    EXPECT_EQ(count(text, "(assert (forall ((x1 Real) (x2 Real))"), 5u);  // three conditions + one per mode
    EXPECT_TRUE(all_lines_balanced(text));
}

TEST(SmtFiles, UnwritablePath) {
    EXPECT_THROW(write_text_file("/nonexistent-dir/q.smt2", "x"), IoError);
    const std::string p = testing::TempDir() + "/q.smt2";
    write_text_file(p, "(check-sat)\n");
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "(check-sat)");
}
