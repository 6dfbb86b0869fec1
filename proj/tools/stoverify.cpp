// Command-line front end: decompose, verify, simulate.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stoverify/stoverify.hpp"

namespace fs = std::filesystem;
using namespace stoverify;

namespace {

constexpr int kInputError = 2;
constexpr int kInternalError = 3;
constexpr int kCheckFailed = 4;

struct Options {
    std::string system;
    std::string out = ".";
    std::string dfa;
    std::string check;
    unsigned degree = 4;
    double dt = 1e-2;
    double horizon = 0.0;
    std::size_t trajectories = 1000;
    std::uint64_t seed = 1;
    std::size_t start_points = 8;
    std::size_t dump = 0;
    int allow_revisits = 0;
    bool multiple = false;
    bool emit_smtlib = false;
    std::string emit_dfa;
    std::vector<std::string> props;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::optional<Dfa> external_dfa(const Options& o) {
    if (o.dfa.empty()) return std::nullopt;
    return load_dfa(o.dfa);
}

fs::path out_dir(const Options& o) {
    fs::path p(o.out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory '" + o.out + "'");
    return p;
}

std::string set_of(const Dfa& d, const std::vector<AcceptingRun>& runs) {
    std::string s = "{";
    for (std::size_t i = 0; i < runs.size(); ++i) s += (i ? ", " : "") + format_run(d, runs[i]);
    return s + "}";
}

int cmd_decompose(const Options& o) {
    const auto sys = load_system(o.system);
    const auto fd = decompose_system(sys, RunOptions{o.allow_revisits}, external_dfa(o));
    const auto& dec = fd.decomposition;
    const Dfa& d = dec.dfa;
    std::cout << "formula:  " << to_string(fd.formula) << '\n'
              << "negation: " << to_string(fd.negated) << '\n'
              << "states:   " << d.num_states() << "\n\n";
    std::cout << "R = " << set_of(d, dec.runs) << '\n';
    for (const auto& [p, runs] : dec.runs_by_prop) std::cout << "R^" << p << " = " << set_of(d, runs) << '\n';
    std::cout << '\n';
    for (const auto& [p, runs] : dec.runs_by_prop)
        for (const auto& r : runs) {
            std::cout << "P^" << p << format_run(d, r) << " = {";
            const auto ts = triples(d, r);
            for (std::size_t i = 0; i < ts.size(); ++i) std::cout << (i ? ", " : "") << format_triple(d, ts[i]);
            std::cout << "}\n";
        }
    if (!o.emit_dfa.empty()) write_text_file(o.emit_dfa, format_dfa(d));
    return 0;
}

std::string file_stem(const ReachTask& t) {
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "+" : "") + v[i];
        return s;
    };
    return "reach_" + join(t.source) + "_to_" + join(t.target);
}

int cmd_verify(const Options& o) {
    const auto sys = load_system(o.system);
    PipelineConfig cfg;
    cfg.cegis.degree = o.degree;
    cfg.multiple = o.multiple;
    cfg.horizon = o.horizon;
    cfg.runs.allow_revisits = o.allow_revisits;
    cfg.dfa = external_dfa(o);
    auto res = run_pipeline(sys, cfg);
    res.report.settings["seed"] = o.seed;
    res.report.settings["system"] = fs::path(o.system).filename().string();

    const fs::path dir = out_dir(o);
    write_text_file((dir / "report.json").string(), report_to_json(res.report).dump(2) + "\n");
    const std::string text = format_report_text(res.report);
    write_text_file((dir / "report.txt").string(), text);
    write_text_file((dir / "triples.csv").string(), format_report_csv(res.report));
    if (o.emit_smtlib) {
        const std::size_t modes = sys.modes.size();
        const BasisSet basis = scaled_basis(sys.state_space, o.degree);
        for (const auto& t : res.tasks) {
            const std::string stem = (dir / file_stem(t.task)).string();
            const auto kind = o.multiple ? CertificateKind::Multiple : CertificateKind::Common;
            const auto bases = o.multiple ? std::vector<BasisSet>(modes, basis) : std::vector<BasisSet>{basis};
            const auto& cert = t.outcome.certificate;
            write_text_file(stem + ".synth.smt2", smtlib_synthesis(t.spec, sys, bases, kind, cert ? cert->gamma : 1.0,
                                                                   cert ? cert->c : 0.0));
            if (cert && !cert->barriers.empty()) write_text_file(stem + ".check.smt2", smtlib_check(*cert, t.spec, sys));
        }
    }
    if (!o.emit_dfa.empty()) write_text_file(o.emit_dfa, format_dfa(res.report.dfa));
    std::cout << text;
    return 0;
}

int cmd_simulate(const Options& o) {
    const auto sys = load_system(o.system);
    if (sys.formula.empty()) throw SchemaError("the system file has no formula");
    const Formula f = parse_formula(sys.formula);
    std::map<std::string, double> lower;
    if (!o.check.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(o.check));
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError(std::string("report is not valid JSON: ") + e.what());
        }
        lower = lower_bounds_from_json(j);
    }
    std::vector<std::string> props = o.props.empty() ? sys.propositions() : o.props;
    for (const auto& p : props) sys.region(p);

    CheckConfig cfg;
    cfg.estimate.dt = o.dt;
    cfg.estimate.horizon = o.horizon;
    cfg.estimate.trajectories = o.trajectories;
    cfg.estimate.seed = o.seed;
    cfg.start_points = o.start_points;
    const auto battery = policy_battery(sys);

    std::map<std::string, double> targets;
    for (const auto& p : props) targets[p] = lower.count(p) ? lower.at(p) : 0.0;
    auto rows = check_bound(targets, sys, f, battery, cfg);

    const fs::path dir = out_dir(o);
    std::ostringstream csv;
    if (o.check.empty()) {
        // no bounds to compare against: leave those columns empty
        std::istringstream in(format_check_csv(rows));
        std::string line;
        std::getline(in, line);
        csv << line << '\n';
        while (std::getline(in, line)) {
            const auto cut = line.rfind(',', line.rfind(',') - 1);
            csv << line.substr(0, cut) << ",,\n";
        }
    } else {
        csv << format_check_csv(rows);
    }
    write_text_file((dir / "estimates.csv").string(), csv.str());

    if (o.dump) {
        SimulationConfig sc;
        sc.horizon = o.horizon;
        for (const auto& p : props) {
            const auto starts = start_points(sys, p, o.start_points);
            if (starts.empty()) continue;
            for (const auto& pol : battery) {
                if (pol.kind == PolicyKind::Adversarial) continue;
                std::string name = pol.name(sys);
                for (auto& ch : name)
                    if (ch == ':') ch = '_';
                for (std::size_t i = 0; i < o.dump; ++i) {
                    const auto tr = simulate(sys, pol, starts[i % starts.size()], o.dt, substream_seed(o.seed, i), sc);
                    write_text_file((dir / ("trajectory_" + p + "_" + name + "_" + std::to_string(i) + ".csv")).string(),
                                    format_trajectory_csv(tr, sys));
                }
            }
        }
    }

    bool ok = true;
    std::cout << csv.str();
    for (const auto& r : rows) {
        if (r.estimate.excluded)
            std::cerr << "warning: " << r.estimate.excluded << " chattering traces excluded for " << r.prop << "/"
                      << r.policy << '\n';
        if (!o.check.empty() && !r.pass) ok = false;
    }
    std::cout << "switching policies form a falsification battery, not an exhaustive search\n";
    if (!o.check.empty()) std::cout << (ok ? "check passed\n" : "check FAILED: a bound exceeds its estimate\n");
    return ok ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic verification of switched stochastic systems against safe LTL on finite traces"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("system", o.system, "System description (JSON)")->required();
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--horizon", o.horizon, "Override the time horizon")->check(CLI::PositiveNumber);
        sub->add_option("--dfa", o.dfa, "Automaton for the violation, instead of translating the formula");
        sub->add_option("--emit-dfa", o.emit_dfa, "Write the automaton used to this file");
        sub->add_option("--allow-revisits", o.allow_revisits, "Times a state may reappear along a run")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", o.seed, "Master random seed");
    };

    auto* dec = app.add_subcommand("decompose", "Print accepting runs and reachability triples");
    common(dec);
    auto* ver = app.add_subcommand("verify", "Synthesize certificates and bound satisfaction probabilities");
    common(ver);
    ver->add_option("--degree", o.degree, "Polynomial degree of the barrier template")->check(CLI::Range(1u, 12u));
    ver->add_flag("--multiple", o.multiple, "One certificate per mode, coupled through the switching rates");
    ver->add_flag("--emit-smtlib", o.emit_smtlib, "Write SMT-LIB queries per reachability task");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates under a battery of switching policies");
    common(sim);
    sim->add_option("--dt", o.dt, "Euler-Maruyama step")->check(CLI::PositiveNumber);
    sim->add_option("--trajectories", o.trajectories, "Trajectories per proposition and policy")
        ->check(CLI::PositiveNumber);
    sim->add_option("--check", o.check, "Report whose lower bounds are checked");
    sim->add_option("--start-points", o.start_points, "Initial states per proposition")->check(CLI::PositiveNumber);
    sim->add_option("--prop", o.props, "Restrict to these starting propositions");
    sim->add_option("--dump-trajectories", o.dump, "Write this many trajectories per proposition and policy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (*dec) return cmd_decompose(o);
        if (*ver) return cmd_verify(o);
        return cmd_simulate(o);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}
