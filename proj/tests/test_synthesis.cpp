#include <gtest/gtest.h>

#include "stoverify/synthesis.hpp"

using namespace stoverify;

namespace {

std::string fixture(const char* name) { return std::string(STOVERIFY_FIXTURES) + "/" + name; }

Predicate pred(std::initializer_list<const char*> cell) {
    Cell c;
    for (const char* s : cell) c.push_back(parse_polynomial(s));
    return Predicate{{c}};
}

CegisConfig fast_config() {
    CegisConfig cfg;
    cfg.cex_grid_per_axis = 401;
    return cfg;
}

// Independent check of the four constraint families on a uniform 1-D grid.
double worst_violation_1d(const Polynomial& B, const Mode& m, const ReachSpec& spec, double gamma, double c,
                          double step) {
    const Polynomial dB = apply_generator(B, m);
    double worst = -1e300;
    for (double x = spec.domain.lower[0]; x <= spec.domain.upper[0] + 1e-12; x += step) {
        const std::vector<double> p = {std::min(x, spec.domain.upper[0])};
        worst = std::max(worst, -B.evaluate(p));
        worst = std::max(worst, dB.evaluate(p) - c);
        if (spec.source.contains(p)) worst = std::max(worst, B.evaluate(p) - gamma);
        if (spec.target.contains(p)) worst = std::max(worst, 1.0 - B.evaluate(p));
    }
    return worst;
}

struct Deterministic : ::testing::Test {
    SwitchedSystem sys = load_system(fixture("deterministic_1d.json"));
    ReachSpec spec = make_reach_spec(sys, region_of(sys, {"p0"}), region_of(sys, {"p1"}));
    BasisSet basis = monomial_basis(1, 2);
};

struct Brownian : ::testing::Test {
    SwitchedSystem sys = load_system(fixture("brownian_1d.json"));
    ReachSpec spec = make_reach_spec(sys, pred({"x1^2"}), region_of(sys, {"p1"}));
    BasisSet basis = monomial_basis(1, 2);
};

}  // namespace

TEST_F(Deterministic, FeasibilityOnSamples) {
    std::vector<std::vector<double>> samples;
    for (int i = 0; i <= 200; ++i) samples.push_back({-1.0 + 0.01 * i});
    const auto a = feasibility_solve(samples, spec, sys, basis, 0.05, 0.0);
    ASSERT_TRUE(a.has_value());
    const CandidateBarrier cb{basis, *a};
    const Polynomial B = cb.polynomial();
    for (const auto& x : samples) {
        EXPECT_GE(B.evaluate(x), 0.0);
        if (spec.source.contains(x)) {
            EXPECT_LE(B.evaluate(x), 0.05);
        }
        if (spec.target.contains(x)) {
            EXPECT_GE(B.evaluate(x), 1.0);
        }
    }
}

TEST_F(Deterministic, ContradictorySpecIsInfeasible) {
    const ReachSpec same{spec.source, spec.source, spec.domain, 1.0};
    std::vector<std::vector<double>> samples = {{0.0}, {0.05}, {-0.05}};
    EXPECT_FALSE(feasibility_solve(samples, same, sys, basis, 0.5, 0.0).has_value());
    const auto out = cegis(same, sys, basis, 0.5, 0.0, fast_config());
    ASSERT_FALSE(out.ok());
    EXPECT_EQ(out.failure->reason, FailureReason::Infeasible);
}

TEST_F(Deterministic, EmptySampleSetIsFeasible) {
    const auto a = feasibility_solve({}, spec, sys, basis, 0.05, 0.0);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(a->size(), 3u);
}

TEST_F(Deterministic, ZeroCandidateViolatesUnsafe) {
    const auto cex = find_counterexample({0.0, 0.0, 0.0}, spec, sys, basis, 0.05, 0.0);
    ASSERT_TRUE(cex.has_value());
    EXPECT_EQ(cex->kind, ConstraintKind::Unsafe);
    EXPECT_TRUE(spec.target.contains(cex->x));
    EXPECT_NEAR(cex->value, 1.0, 1e-12);
}

TEST_F(Deterministic, CegisCertificateVerifiesAndSurvivesFineGrid) {
    const auto out = cegis(spec, sys, basis, 0.05, 0.0, fast_config());
    ASSERT_TRUE(out.ok()) << out.failure->detail;
    const auto& cert = *out.certificate;
    EXPECT_FALSE(cert.verified);
    EXPECT_FALSE(find_counterexample(cert.stacked_coefficients(), spec, sys, basis, 0.05, 0.0).has_value());
    EXPECT_LE(worst_violation_1d(cert.barriers[0].polynomial(), sys.modes[0], spec, 0.05, 0.0, 1e-4), 0.0);
    EXPECT_EQ(verify_barrier(cert, spec, sys).status, VerifyStatus::Verified);
}

TEST_F(Deterministic, VerifierCatchesUnderstatedGamma) {
    BarrierCertificate cert;
    cert.barriers = {CandidateBarrier{basis, {0.0, 0.0, 1.0 / 0.81}}};
    cert.gamma = 0.01 / 0.81 + 1e-6;
    cert.c = 0.0;
    EXPECT_EQ(verify_barrier(cert, spec, sys).status, VerifyStatus::Verified);
    cert.gamma = 0.01 / 0.81 - 1e-3;
    const auto v = verify_barrier(cert, spec, sys);
    ASSERT_EQ(v.status, VerifyStatus::CounterexampleFound);
    EXPECT_EQ(v.counterexample->kind, ConstraintKind::Initial);
}

TEST_F(Deterministic, VerifierRejectsZeroBarrier) {
    BarrierCertificate cert;
    cert.barriers = {CandidateBarrier{basis, {0.0, 0.0, 0.0}}};
    cert.gamma = 0.5;
    const auto v = verify_barrier(cert, spec, sys);
    ASSERT_EQ(v.status, VerifyStatus::CounterexampleFound);
    EXPECT_EQ(v.counterexample->kind, ConstraintKind::Unsafe);
}

TEST_F(Deterministic, MinimizeBoundReachesQuadraticOptimum) {
    BoundSearch stats;
    const auto out = minimize_bound(spec, sys, basis, fast_config(), &stats);
    ASSERT_TRUE(out.ok());
    const auto& cert = *out.certificate;
    EXPECT_TRUE(cert.verified);
    EXPECT_EQ(cert.c, 0.0);
    EXPECT_GE(cert.gamma, 1.0 / 81.0 - 1e-6);
    EXPECT_LE(cert.gamma, 1.0 / 81.0 + 2e-4);
    EXPECT_LE(worst_violation_1d(cert.barriers[0].polynomial(), sys.modes[0], spec, cert.gamma, cert.c, 1e-4), 1e-9);
}

TEST_F(Deterministic, InfeasibleTemplateFails) {
    const auto out = minimize_bound(spec, sys, monomial_basis(1, 0), fast_config());
    ASSERT_FALSE(out.ok());
}

TEST_F(Deterministic, MonotoneUnderRelaxation) {
    const auto out = cegis(spec, sys, basis, 0.05, 0.0, fast_config());
    ASSERT_TRUE(out.ok());
    BarrierCertificate cert = *out.certificate;
    for (double d : {0.0, 0.01, 0.2}) {
        cert.gamma = 0.05 + d;
        cert.c = d;
        EXPECT_EQ(verify_barrier(cert, spec, sys).status, VerifyStatus::Verified);
    }
}

TEST_F(Deterministic, IntersectingSetsShortCircuit) {
    const ReachSpec overlap{spec.source, pred({"x1^2 - 0.04"}), spec.domain, 1.0};
    const auto out = minimize_bound(overlap, sys, basis, fast_config());
    ASSERT_TRUE(out.ok());
    EXPECT_TRUE(out.certificate->trivial);
    EXPECT_EQ(out.certificate->bound(), 1.0);
}

TEST_F(Brownian, QuadraticGeneratorViolatesZeroC) {
    // B = x^2 has generator 1 > 0
    const auto cex = find_counterexample({0.0, 0.0, 1.0}, spec, sys, basis, 1.0, 0.0);
    ASSERT_TRUE(cex.has_value());
    EXPECT_TRUE(cex->kind == ConstraintKind::Generator || cex->kind == ConstraintKind::Unsafe);
    const auto gen_only = find_counterexample({0.5, 0.0, 1.0}, spec, sys, basis, 1.0, 0.0);
    ASSERT_TRUE(gen_only.has_value());
    EXPECT_EQ(gen_only->kind, ConstraintKind::Generator);
    EXPECT_NEAR(gen_only->value, 1.0, 1e-12);
}

TEST_F(Brownian, CegisFindsQuarterSlopeCertificate) {
    const auto out = cegis(spec, sys, basis, 0.05, 0.25, fast_config());
    ASSERT_TRUE(out.ok()) << out.failure->detail;
    const auto& cert = *out.certificate;
    EXPECT_NEAR(cert.bound(), 0.3, 1e-6);
    EXPECT_LE(worst_violation_1d(cert.barriers[0].polynomial(), sys.modes[0], spec, 0.05, 0.25, 1e-4), 0.0);
    EXPECT_EQ(verify_barrier(cert, spec, sys).status, VerifyStatus::Verified);
}

TEST_F(Brownian, MinimizedBoundBelowOne) {
    const auto out = minimize_bound(spec, sys, monomial_basis(1, 4), fast_config());
    ASSERT_TRUE(out.ok());
    EXPECT_TRUE(out.certificate->verified);
    EXPECT_LT(out.certificate->bound(), 1.0);
    const auto& cert = *out.certificate;
    EXPECT_LE(worst_violation_1d(cert.barriers[0].polynomial(), sys.modes[0], spec, cert.gamma, cert.c, 1e-4), 1e-9);
}

TEST(MultipleCertificates, RequireRates) {
    const auto sys = load_system(fixture("brownian_1d.json"));
    const auto spec = make_reach_spec(sys, region_of(sys, {"p0"}), region_of(sys, {"p1"}));
    EXPECT_THROW(cegis_multiple(spec, sys, {monomial_basis(1, 2)}, 0.1, 0.5), MissingRates);
}

namespace {

SwitchedSystem two_mode(const char* g2, const char* r12, const char* r21) {
    nlohmann::json j = nlohmann::json::parse(std::ifstream(fixture("brownian_1d.json")));
    j["modes"] = nlohmann::json::array(
        {{{"id", "1"}, {"drift", {"0"}}, {"diffusion", nlohmann::json::array({nlohmann::json::array({"1"})})}},
         {{"id", "2"}, {"drift", {"0"}}, {"diffusion", nlohmann::json::array({nlohmann::json::array({g2})})}}});
    j["rates"] = nlohmann::json::array({nlohmann::json::array({std::string("-") + r12, r12}),
                                        nlohmann::json::array({r21, std::string("-") + r21})});
    return system_from_json(j);
}

}  // namespace

TEST(MultipleCertificates, DecoupledIdenticalModesMatchCommon) {
    const auto sys = two_mode("1", "0", "0");
    const auto spec = make_reach_spec(sys, region_of(sys, {"p0"}), region_of(sys, {"p1"}));
    auto cfg = fast_config();
    const auto common = minimize_bound(spec, sys, monomial_basis(1, 2), cfg);
    const auto multi = minimize_bound_multiple(spec, sys, {monomial_basis(1, 2), monomial_basis(1, 2)}, cfg);
    ASSERT_TRUE(common.ok());
    ASSERT_TRUE(multi.ok());
    EXPECT_NEAR(multi.certificate->bound(), common.certificate->bound(), 5e-3);
}

TEST(MultipleCertificates, CoupledBrownianAndStillModes) {
    const auto sys = two_mode("0", "1", "1");
    const auto spec = make_reach_spec(sys, region_of(sys, {"p0"}), region_of(sys, {"p1"}));
    const auto out = minimize_bound_multiple(spec, sys, {monomial_basis(1, 2), monomial_basis(1, 2)}, fast_config());
    ASSERT_TRUE(out.ok());
    const auto& cert = *out.certificate;
    EXPECT_TRUE(cert.verified);
    EXPECT_LT(cert.bound(), 1.0);
    ASSERT_EQ(cert.barriers.size(), 2u);
    EXPECT_EQ(verify_barrier(cert, spec, sys).status, VerifyStatus::Verified);
    // the coupled generator inequality holds for both modes on a fine grid
    const auto& lam = *sys.rates;
    const std::vector<Polynomial> B = {cert.barriers[0].polynomial(), cert.barriers[1].polynomial()};
    for (double x = -2.0; x <= 2.0; x += 1e-3)
        for (std::size_t m = 0; m < 2; ++m)
            EXPECT_LE(apply_generator_multi(B, m, sys.modes, lam).evaluate(std::vector<double>{x}), cert.c + 1e-9);
}

TEST(Certificates, JsonRoundTrip) {
    BarrierCertificate cert;
    cert.barriers = {CandidateBarrier{monomial_basis(2, 2), {1, 0.5, -0.25, 1e-3, 0, 7}}};
    cert.gamma = 0.125;
    cert.c = 0.01;
    cert.horizon = 10;
    cert.verified = true;
    const auto back = certificate_from_json(certificate_to_json(cert));
    EXPECT_EQ(back.gamma, cert.gamma);
    EXPECT_EQ(back.c, cert.c);
    EXPECT_EQ(back.barriers[0].coefficients, cert.barriers[0].coefficients);
    EXPECT_EQ(back.barriers[0].basis, cert.barriers[0].basis);
    EXPECT_EQ(certificate_to_json(back).dump(), certificate_to_json(cert).dump());
}
