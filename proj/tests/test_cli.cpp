#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string fixture(const char* name) { return std::string(STOVERIFY_FIXTURES) + "/" + name; }

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string log = testing::TempDir() + "/cli_out.txt";
    const std::string cmd = std::string(STOVERIFY_CLI) + " " + args + " > " + log + " 2>&1";
    const int st = std::system(cmd.c_str());
    std::ifstream in(log);
    std::ostringstream s;
    s << in.rdbuf();
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, s.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path temp(const std::string& name) {
    fs::path p = fs::path(testing::TempDir()) / ("stoverify_cli_" + name);
    fs::remove_all(p);
    return p;
}

fs::path with_formula(const std::string& formula) {
    auto j = nlohmann::json::parse(slurp(fixture("brownian_1d.json")));
    j["formula"] = formula;
    fs::path p = fs::path(testing::TempDir()) / "formula_variant.json";
    std::ofstream(p) << j.dump();
    return p;
}

}  // namespace

TEST(Cli, DecomposePrintsExampleSets) {
    const auto r = run("decompose " + fixture("example_2_11.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("R^p0 = {(q0,q1,q2,q3), (q0,q1,q4,q3)}"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("R^p2 = {(q0,q4,q3)}"), std::string::npos);
    EXPECT_NE(r.out.find("P^p0(q0,q1,q4,q3) = {(q0,q1,q4), (q1,q4,q3)}"), std::string::npos);
    EXPECT_NE(r.out.find("P^p3(q0,q3) = {}"), std::string::npos);
}

TEST(Cli, DecomposeSingleTripleAndDfaExport) {
    const auto dfa = temp("g.dfa");
    const auto r = run("decompose " + fixture("brownian_1d.json") + " --emit-dfa " + dfa.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("P^p0(q0,q1,q2) = {(q0,q1,q2)}"), std::string::npos) << r.out;
    EXPECT_NE(slurp(dfa).find("accepting:"), std::string::npos);
    // the exported automaton can be fed back in
    const auto again = run("decompose " + fixture("brownian_1d.json") + " --dfa " + dfa.string());
    EXPECT_EQ(again.code, 0) << again.out;
    EXPECT_EQ(again.out, r.out);
}

TEST(Cli, InputErrorsExitTwo) {
    EXPECT_EQ(run("decompose " + with_formula("X p0").string()).code, 2);
    EXPECT_NE(run("decompose " + with_formula("X p0").string()).out.find("next operator"), std::string::npos);
    EXPECT_EQ(run("decompose " + with_formula("G !p9").string()).code, 2);
    EXPECT_EQ(run("decompose /nonexistent/system.json").code, 2);
    EXPECT_EQ(run("verify " + fixture("brownian_1d.json") + " --degree 0").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("verify " + fixture("brownian_1d.json") + " --multiple --out " + temp("m").string()).code, 2);
    EXPECT_EQ(run("simulate " + fixture("switching_rates.json") + " --dt 0.3 --out " + temp("s").string()).code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, VerifyWritesReportsDeterministically) {
    const auto a = temp("va"), b = temp("vb");
    const auto ra = run("verify " + fixture("brownian_1d.json") + " --seed 9 --emit-smtlib --out " + a.string());
    ASSERT_EQ(ra.code, 0) << ra.out;
    ASSERT_EQ(run("verify " + fixture("brownian_1d.json") + " --seed 9 --emit-smtlib --out " + b.string()).code, 0);
    for (const char* f : {"report.json", "triples.csv", "report.txt", "reach_p0_to_p1.check.smt2"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_EQ(slurp(a / "triples.csv").substr(0, 28), "triple,gamma,c,bound,status\n");
    const auto j = nlohmann::json::parse(slurp(a / "report.json"));
    EXPECT_GE(j["propositions"]["p0"]["lower_satisfaction"].get<double>(), 0.7);
    EXPECT_NE(slurp(a / "reach_p0_to_p1.check.smt2").find("(declare-fun x1 () Real)"), std::string::npos);
}

TEST(Cli, SimulateChecksReports) {
    const auto dir = temp("sim");
    ASSERT_EQ(run("verify " + fixture("brownian_1d.json") + " --out " + dir.string()).code, 0);
    const std::string report = (dir / "report.json").string();
    const std::string base = "simulate " + fixture("brownian_1d.json") + " --trajectories 1000 --dt 1e-3 --out " + dir.string();
    auto r = run(base + " --check " + report);
    EXPECT_EQ(r.code, 0) << r.out;
    const std::string csv = slurp(dir / "estimates.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "prop,policy,n,k,phat,ci_lo,ci_hi,bound,pass");

    auto j = nlohmann::json::parse(slurp(dir / "report.json"));
    j["propositions"]["p0"]["lower_satisfaction"] = 0.99;
    const auto bad = dir / "corrupted.json";
    std::ofstream(bad) << j.dump();
    r = run(base + " --check " + bad.string());
    EXPECT_EQ(r.code, 4) << r.out;

    std::ofstream(dir / "garbage.json") << "{not json";
    EXPECT_EQ(run(base + " --check " + (dir / "garbage.json").string()).code, 2);
}

TEST(Cli, SimulateWithoutCheckAndDumps) {
    const auto dir = temp("dump");
    const auto r = run("simulate " + fixture("switching_rates.json") +
                       " --trajectories 50 --prop p0 --dump-trajectories 1 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const std::string csv = slurp(dir / "estimates.csv");
    EXPECT_NE(csv.find("p0,markov,50,"), std::string::npos) << csv;
    EXPECT_NE(csv.find(",,\n"), std::string::npos);
    const auto tr = slurp(dir / "trajectory_p0_markov_0.csv");
    EXPECT_EQ(tr.substr(0, tr.find('\n')), "t,x1,mode,prop");
}
