#pragma once

// Decomposition of the accepting runs of a DFA for the negated property into
// sequential reachability triples.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "stoverify/dfa.hpp"
#include "stoverify/error.hpp"

namespace stoverify {

struct AcceptingRun {
    std::vector<int> states;

    std::size_t size() const { return states.size(); }
    friend bool operator==(const AcceptingRun&, const AcceptingRun&) = default;
    friend auto operator<=>(const AcceptingRun&, const AcceptingRun&) = default;
};

struct ReachTriple {
    int from = 0, via = 0, to = 0;
    std::vector<int> source_labels;  // letters on from -> via
    std::vector<int> target_labels;  // letters on via -> to

    std::tuple<int, int, int> key() const { return {from, via, to}; }
    friend bool operator==(const ReachTriple& a, const ReachTriple& b) { return a.key() == b.key(); }
    friend bool operator<(const ReachTriple& a, const ReachTriple& b) { return a.key() < b.key(); }
};

struct RunOptions {
    // How many times a state may reappear non-consecutively along one run.
    int allow_revisits = 0;
};

// All runs (q0, ..., qn), n >= 1, from an initial to an accepting state along
// edges q -> q' with q != q', found by depth-first search.
inline std::vector<AcceptingRun> accepting_runs(const Dfa& d, RunOptions opts = {}) {
    const int n = static_cast<int>(d.num_states());
    std::vector<std::vector<int>> succ(n);
    for (int q = 0; q < n; ++q)
        for (int t = 0; t < n; ++t)
            if (t != q && !d.labels(q, t).empty()) succ[q].push_back(t);

    std::vector<AcceptingRun> out;
    std::vector<int> path;
    std::vector<int> visits(n, 0);
    auto dfs = [&](auto&& self, int q) -> void {
        path.push_back(q);
        ++visits[q];
        if (path.size() >= 2 && d.is_accepting(q)) out.push_back(AcceptingRun{path});
        for (int t : succ[q])
            if (visits[t] <= opts.allow_revisits) self(self, t);
        --visits[q];
        path.pop_back();
    };
    for (int q0 : d.initial()) dfs(dfs, q0);
    return out;
}

// Runs whose first edge can be read with letter p.
inline std::vector<AcceptingRun> runs_by_proposition(const Dfa& d, const std::vector<AcceptingRun>& runs,
                                                     const std::string& p) {
    const int letter = d.letter_index(p);
    std::vector<AcceptingRun> out;
    for (const auto& r : runs) {
        if (r.size() < 2) continue;
        if (d.next(r.states[0], letter) == r.states[1]) out.push_back(r);
    }
    return out;
}

inline std::vector<ReachTriple> triples(const Dfa& d, const AcceptingRun& run) {
    if (run.size() < 2) throw RunTooShort("a run needs at least two states");
    std::vector<ReachTriple> out;
    for (std::size_t k = 0; k + 2 < run.size(); ++k) {
        ReachTriple t;
        t.from = run.states[k];
        t.via = run.states[k + 1];
        t.to = run.states[k + 2];
        t.source_labels = d.labels(t.from, t.via);
        t.target_labels = d.labels(t.via, t.to);
        out.push_back(std::move(t));
    }
    return out;
}

struct Decomposition {
    Dfa dfa;
    std::vector<AcceptingRun> runs;
    // keyed by proposition, in alphabet order
    std::map<std::string, std::vector<AcceptingRun>> runs_by_prop;
};

inline Decomposition decompose(const Dfa& dfa, RunOptions opts = {}) {
    Decomposition out{dfa, accepting_runs(dfa, opts), {}};
    for (const auto& p : dfa.alphabet()) out.runs_by_prop[p] = runs_by_proposition(dfa, out.runs, p);
    return out;
}

inline std::string format_run(const Dfa& d, const std::vector<int>& states) {
    std::string s = "(";
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i) s += ',';
        s += d.state_name(states[i]);
    }
    return s + ")";
}

inline std::string format_run(const Dfa& d, const AcceptingRun& r) { return format_run(d, r.states); }

inline std::string format_triple(const Dfa& d, const ReachTriple& t) { return format_run(d, {t.from, t.via, t.to}); }

}  // namespace stoverify
