#pragma once

// End to end: formula -> automaton for the violation -> reachability tasks ->
// barrier certificates -> assembled bounds.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stoverify/assembly.hpp"
#include "stoverify/decomposition.hpp"
#include "stoverify/dfa.hpp"
#include "stoverify/ltl.hpp"
#include "stoverify/parallel.hpp"
#include "stoverify/synthesis.hpp"

namespace stoverify {

struct FormulaDecomposition {
    Formula formula;
    Formula negated;
    Decomposition decomposition;
};

inline FormulaDecomposition decompose_formula(const Formula& f, const std::vector<std::string>& alphabet,
                                              RunOptions opts = {}) {
    const Formula neg = negate_to_pnf(f);
    const Dfa dfa = anchor_initial(translate(neg, alphabet));
    return {f, neg, decompose(dfa, opts)};
}

// With `external`, that automaton (for the violation) replaces the translation.
inline FormulaDecomposition decompose_system(const SwitchedSystem& sys, RunOptions opts = {},
                                             const std::optional<Dfa>& external = std::nullopt) {
    if (sys.formula.empty()) throw SchemaError("the system file has no formula");
    const Formula f = parse_formula(sys.formula);
    if (!is_safe_fragment(f)) throw UnsupportedOperator("formula is outside the supported fragment");
    for (const auto& a : atoms(f)) sys.region(a);
    if (!external) return decompose_formula(f, sys.propositions(), opts);
    for (const auto& p : sys.propositions()) external->letter_index(p);
    return {f, negate_to_pnf(f), decompose(anchor_initial(*external), opts)};
}

// One reachability problem: from L^{-1}(source) to L^{-1}(target).
struct ReachTask {
    std::vector<std::string> source;
    std::vector<std::string> target;
    friend auto operator<=>(const ReachTask&, const ReachTask&) = default;
};

// Source and target propositions of the k-th triple of a run that starts
// with proposition p.
inline ReachTask task_for(const Dfa& d, const ReachTriple& t, std::size_t k, const std::string& p) {
    ReachTask task;
    task.source = k == 0 ? std::vector<std::string>{p} : d.label_names(t.from, t.via);
    task.target = d.label_names(t.via, t.to);
    return task;
}

struct PipelineConfig {
    CegisConfig cegis;
    bool multiple = false;
    double horizon = 0.0;  // 0: the system's horizon
    RunOptions runs;
    std::optional<Dfa> dfa;  // automaton for the violation, instead of translating
    unsigned threads = 0;  // 0: thread_count()
};

struct TaskResult {
    ReachTask task;
    ReachSpec spec;
    SynthesisOutcome outcome;
};

struct PipelineResult {
    FormulaDecomposition decomposition;
    std::vector<TaskResult> tasks;  // sorted by task
    VerificationReport report;
};

inline std::vector<ReachTask> reach_tasks(const Decomposition& dec) {
    std::set<ReachTask> s;
    for (const auto& [p, runs] : dec.runs_by_prop)
        for (const auto& r : runs) {
            const auto ts = triples(dec.dfa, r);
            for (std::size_t k = 0; k < ts.size(); ++k) s.insert(task_for(dec.dfa, ts[k], k, p));
        }
    return {s.begin(), s.end()};
}

inline SynthesisOutcome synthesize_task(const ReachSpec& spec, const SwitchedSystem& sys, const PipelineConfig& cfg) {
    const BasisSet basis = scaled_basis(sys.state_space, cfg.cegis.degree);
    if (cfg.multiple) {
        if (!sys.rates) throw MissingRates("multiple certificates need switching rates in the system file");
        return minimize_bound_multiple(spec, sys, std::vector<BasisSet>(sys.modes.size(), basis), cfg.cegis);
    }
    return minimize_bound(spec, sys, basis, cfg.cegis);
}

inline PipelineResult run_pipeline(const SwitchedSystem& sys, const PipelineConfig& cfg) {
    cfg.cegis.validate();
    const double T = cfg.horizon > 0.0 ? cfg.horizon : sys.horizon;
    if (!(T > 0.0)) throw InputError("horizon must be positive");
    if (cfg.multiple && !sys.rates) throw MissingRates("multiple certificates need switching rates in the system file");

    PipelineResult out{decompose_system(sys, cfg.runs, cfg.dfa), {}, {}};
    const Decomposition& dec = out.decomposition.decomposition;
    for (auto& t : reach_tasks(dec)) {
        ReachSpec spec = make_reach_spec(sys, region_of(sys, t.source), region_of(sys, t.target));
        spec.horizon = T;
        out.tasks.push_back({std::move(t), std::move(spec), {}});
    }
    parallel_for(
        out.tasks.size(), [&](std::size_t i) { out.tasks[i].outcome = synthesize_task(out.tasks[i].spec, sys, cfg); },
        cfg.threads ? cfg.threads : thread_count());

    std::map<ReachTask, const TaskResult*> by_task;
    for (const auto& t : out.tasks) by_task[t.task] = &t;
    std::map<std::string, TripleBounds> per_prop;
    for (const auto& [p, runs] : dec.runs_by_prop)
        for (const auto& r : runs) {
            const auto ts = triples(dec.dfa, r);
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const ReachTask task = task_for(dec.dfa, ts[k], k, p);
                const TaskResult& res = *by_task.at(task);
                TripleBound b = res.outcome.ok() ? TripleBound::from_certificate(ts[k], *res.outcome.certificate)
                                                 : TripleBound::assumed_one(ts[k], to_string(res.outcome.failure->reason));
                b.source = task.source;
                b.target = task.target;
                // the initial state has no incoming edges, so k == 0 exactly for triples leaving it
                per_prop[p][ts[k]] = std::move(b);
            }
        }
    out.report = build_report(dec, per_prop, T);
    out.report.formula = to_string(out.decomposition.formula);
    out.report.negated = to_string(out.decomposition.negated);
    auto& s = out.report.settings;
    s["degree"] = cfg.cegis.degree;
    s["certificates"] = cfg.multiple ? "multiple" : "common";
    s["epsilon"] = cfg.cegis.epsilon;
    s["max_iterations"] = cfg.cegis.max_iterations;
    s["c_schedule"] = cfg.cegis.c_schedule;
    s["bisection_tolerance"] = cfg.cegis.bisection_tolerance;
    s["state_space"] = "compact; the process is stopped on leaving it";
    s["verification"] = "interval enclosure over adaptive subdivision of the state space";
    return out;
}

}  // namespace stoverify
