#include <gtest/gtest.h>

#include <array>
#include <random>

#include "stoverify/lp.hpp"

using namespace stoverify;

namespace {

// Independent oracle for k = 2: the optimum of max t over the polyhedron in
// (a1, a2, t) lies on a vertex, so enumerate all triples of active planes.
double vertex_oracle(const std::vector<double>& G, const std::vector<double>& o, double U, double cap) {
    // planes p.(a1, a2, t) <= q
    std::vector<std::array<double, 4>> planes;
    for (std::size_t s = 0; s < o.size(); ++s) planes.push_back({G[2 * s], G[2 * s + 1], 1.0, -o[s]});
    planes.push_back({1, 0, 0, U});
    planes.push_back({-1, 0, 0, U});
    planes.push_back({0, 1, 0, U});
    planes.push_back({0, -1, 0, U});
    planes.push_back({0, 0, 1, cap});
    double best = -1e300;
    const std::size_t P = planes.size();
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = i + 1; j < P; ++j)
            for (std::size_t l = j + 1; l < P; ++l) {
                const auto &A = planes[i], &B = planes[j], &C = planes[l];
                const double det = A[0] * (B[1] * C[2] - B[2] * C[1]) - A[1] * (B[0] * C[2] - B[2] * C[0]) +
                                   A[2] * (B[0] * C[1] - B[1] * C[0]);
                if (std::fabs(det) < 1e-12) continue;
                auto solve = [&](int col) {
                    std::array<std::array<double, 3>, 3> M = {{{A[0], A[1], A[2]}, {B[0], B[1], B[2]}, {C[0], C[1], C[2]}}};
                    M[0][col] = A[3];
                    M[1][col] = B[3];
                    M[2][col] = C[3];
                    return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                            M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                            M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])) /
                           det;
                };
                const double x = solve(0), y = solve(1), t = solve(2);
                bool ok = true;
                for (const auto& p : planes)
                    if (p[0] * x + p[1] * y + p[2] * t > p[3] + 1e-9 * (1 + std::fabs(p[3]))) ok = false;
                if (ok) best = std::max(best, t);
            }
    return best;
}

}  // namespace

TEST(MaxMinSlack, OneDimensionalBalance) {
    // a <= -t and 1 - a <= -t: best at a = 0.5 with t = -0.5
    const auto r = max_min_slack({1.0, -1.0}, {0.0, 1.0}, 1);
    EXPECT_TRUE(r.optimal);
    EXPECT_NEAR(r.a[0], 0.5, 1e-12);
    EXPECT_NEAR(r.t, -0.5, 1e-12);
}

TEST(MaxMinSlack, NoRowsGivesCap) {
    const auto r = max_min_slack({}, {}, 3);
    EXPECT_TRUE(r.optimal);
    EXPECT_EQ(r.t, 1.0);
    EXPECT_EQ(r.a, std::vector<double>(3, 0.0));
}

TEST(MaxMinSlack, CoefficientBoxIsRespected) {
    // -a + 0 <= -t wants a large; the box caps a at U
    SlackLpOptions opts;
    opts.coefficient_bound = 5.0;
    opts.slack_cap = 100.0;
    const auto r = max_min_slack({-1.0}, {0.0}, 1, opts);
    EXPECT_NEAR(r.a[0], 5.0, 1e-12);
    EXPECT_NEAR(r.t, 5.0, 1e-12);
}

TEST(MaxMinSlack, AgreesWithVertexEnumeration) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 3 + trial % 12;
        std::vector<double> G(2 * m), o(m);
        for (auto& v : G) v = nd(rng);
        for (auto& v : o) v = nd(rng);
        SlackLpOptions opts;
        opts.coefficient_bound = 10.0;
        const auto r = max_min_slack(G, o, 2, opts);
        ASSERT_TRUE(r.optimal);
        EXPECT_NEAR(r.t, vertex_oracle(G, o, 10.0, 1.0), 1e-8) << "trial " << trial;
    }
}

TEST(MaxMinSlack, DegenerateRowsTerminate) {
    // many repeated rows and zero offsets stress degenerate pivoting
    std::vector<double> G, o;
    for (int s = 0; s < 300; ++s) {
        const double th = 0.1 * (s % 30);
        G.push_back(std::cos(th));
        G.push_back(std::sin(th));
        G.push_back(0.0);
        o.push_back(s % 3 == 0 ? 0.0 : 1.0);
    }
    const auto r = max_min_slack(G, o, 3);
    EXPECT_TRUE(r.optimal);
    EXPECT_TRUE(std::isfinite(r.t));
}
