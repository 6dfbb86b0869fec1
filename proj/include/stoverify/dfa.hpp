#pragma once

// Deterministic finite automata over a proposition alphabet (one letter per
// proposition), their text format, Hopcroft minimisation, and translation of
// finite-trace formulas by formula progression.

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stoverify/error.hpp"
#include "stoverify/ltl.hpp"

namespace stoverify {

class Dfa {
public:
    static constexpr int kNone = -1;

    Dfa() = default;
    explicit Dfa(std::vector<std::string> alphabet) : alphabet_(std::move(alphabet)) {}

    int add_state(std::string name, bool accepting = false) {
        if (index_.count(name)) throw InputError("duplicate DFA state '" + name + "'");
        const int id = static_cast<int>(names_.size());
        index_[name] = id;
        names_.push_back(std::move(name));
        accepting_.push_back(accepting);
        delta_.emplace_back(alphabet_.size(), kNone);
        return id;
    }

    void set_initial(int q, bool initial = true) {
        auto it = std::find(initial_.begin(), initial_.end(), q);
        if (initial && it == initial_.end()) {
            initial_.push_back(q);
            std::sort(initial_.begin(), initial_.end());
        } else if (!initial && it != initial_.end()) {
            initial_.erase(it);
        }
    }
    void set_accepting(int q, bool acc) { accepting_.at(q) = acc; }
    void set_transition(int q, int letter, int target) { delta_.at(q).at(letter) = target; }

    std::size_t num_states() const { return names_.size(); }
    std::size_t num_letters() const { return alphabet_.size(); }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::string& state_name(int q) const { return names_.at(q); }
    const std::vector<int>& initial() const { return initial_; }
    bool is_initial(int q) const { return std::find(initial_.begin(), initial_.end(), q) != initial_.end(); }
    bool is_accepting(int q) const { return accepting_.at(q); }
    int next(int q, int letter) const { return delta_.at(q).at(letter); }

    int state_index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw InputError("unknown DFA state '" + name + "'");
        return it->second;
    }
    int letter_index(const std::string& p) const {
        auto it = std::find(alphabet_.begin(), alphabet_.end(), p);
        if (it == alphabet_.end()) throw UnknownProposition("proposition '" + p + "' is not in the DFA alphabet");
        return static_cast<int>(it - alphabet_.begin());
    }

    bool is_total() const {
        for (const auto& row : delta_)
            for (int t : row)
                if (t == kNone) return false;
        return true;
    }

    // Letters driving q to q2 (the edge label set).
    std::vector<int> labels(int q, int q2) const {
        std::vector<int> out;
        for (std::size_t a = 0; a < alphabet_.size(); ++a)
            if (delta_.at(q)[a] == q2) out.push_back(static_cast<int>(a));
        return out;
    }
    std::vector<std::string> label_names(int q, int q2) const {
        std::vector<std::string> out;
        for (int a : labels(q, q2)) out.push_back(alphabet_[a]);
        return out;
    }

    bool accepts(const std::vector<std::string>& word) const {
        for (int q0 : initial_) {
            int q = q0;
            for (const auto& l : word) {
                q = next(q, letter_index(l));
                if (q == kNone) break;
            }
            if (q != kNone && accepting_[q]) return true;
        }
        return false;
    }

    // Completes δ by routing missing transitions to a fresh rejecting sink.
    Dfa totalized() const {
        if (is_total()) return *this;
        Dfa out = *this;
        std::string sink = "sink";
        while (out.index_.count(sink)) sink += "_";
        const int s = out.add_state(sink, false);
        for (std::size_t q = 0; q < out.num_states(); ++q)
            for (std::size_t a = 0; a < alphabet_.size(); ++a)
                if (out.delta_[q][a] == kNone) out.delta_[q][a] = s;
        return out;
    }

private:
    std::vector<std::string> alphabet_;
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<int> initial_;
    std::vector<bool> accepting_;
    std::vector<std::vector<int>> delta_;
};

// ---------------------------------------------------------------------------
// Text format:
//   states: q0 q1 ...
//   initial: q0
//   accepting: q3
//   trans: q0 p0 q1
// Blank lines and '#' comments are ignored. The alphabet is the set of
// letters used in transitions plus any listed on an optional 'alphabet:' line.

inline Dfa parse_dfa(std::istream& in) {
    std::vector<std::string> states, initial, accepting, alphabet;
    std::vector<std::array<std::string, 3>> trans;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::vector<std::string> items;
        for (std::string tok; ls >> tok;) items.push_back(tok);
        if (key == "states:") {
            states.insert(states.end(), items.begin(), items.end());
        } else if (key == "initial:") {
            initial.insert(initial.end(), items.begin(), items.end());
        } else if (key == "accepting:") {
            accepting.insert(accepting.end(), items.begin(), items.end());
        } else if (key == "alphabet:") {
            alphabet.insert(alphabet.end(), items.begin(), items.end());
        } else if (key == "trans:") {
            if (items.size() != 3) throw SchemaError("DFA line " + std::to_string(lineno) + ": trans needs 3 fields");
            trans.push_back({items[0], items[1], items[2]});
        } else {
            throw SchemaError("DFA line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (states.empty()) throw SchemaError("DFA has no states");
    if (initial.empty()) throw SchemaError("DFA has no initial state");
    for (const auto& t : trans)
        if (std::find(alphabet.begin(), alphabet.end(), t[1]) == alphabet.end()) alphabet.push_back(t[1]);

    Dfa d(alphabet);
    for (const auto& s : states) d.add_state(s);
    for (const auto& s : initial) d.set_initial(d.state_index(s));
    for (const auto& s : accepting) d.set_accepting(d.state_index(s), true);
    for (const auto& t : trans) {
        const int q = d.state_index(t[0]);
        const int a = d.letter_index(t[1]);
        const int q2 = d.state_index(t[2]);
        if (d.next(q, a) != Dfa::kNone && d.next(q, a) != q2)
            throw SchemaError("nondeterministic transition from " + t[0] + " on " + t[1]);
        d.set_transition(q, a, q2);
    }
    return d.totalized();
}

inline Dfa load_dfa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open DFA file '" + path + "'");
    return parse_dfa(in);
}

inline std::string format_dfa(const Dfa& d) {
    std::ostringstream out;
    out << "states:";
    for (std::size_t q = 0; q < d.num_states(); ++q) out << ' ' << d.state_name(static_cast<int>(q));
    out << "\ninitial:";
    for (int q : d.initial()) out << ' ' << d.state_name(q);
    out << "\naccepting:";
    for (std::size_t q = 0; q < d.num_states(); ++q)
        if (d.is_accepting(static_cast<int>(q))) out << ' ' << d.state_name(static_cast<int>(q));
    out << "\nalphabet:";
    for (const auto& a : d.alphabet()) out << ' ' << a;
    out << '\n';
    for (std::size_t q = 0; q < d.num_states(); ++q)
        for (std::size_t a = 0; a < d.num_letters(); ++a) {
            const int t = d.next(static_cast<int>(q), static_cast<int>(a));
            if (t != Dfa::kNone)
                out << "trans: " << d.state_name(static_cast<int>(q)) << ' ' << d.alphabet()[a] << ' '
                    << d.state_name(t) << '\n';
        }
    return out.str();
}

// ---------------------------------------------------------------------------
// Structural operations

// Renames states q0, q1, ... in depth-first preorder from the initial states,
// following letters in alphabet order; unreachable states are dropped.
inline Dfa canonical_order(const Dfa& d) {
    std::vector<int> order;
    std::vector<char> seen(d.num_states(), 0);
    for (int q0 : d.initial()) {
        auto visit = [&](auto&& self, int q) -> void {
            if (seen[q]) return;
            seen[q] = 1;
            order.push_back(q);
            for (std::size_t a = 0; a < d.num_letters(); ++a) {
                const int t = d.next(q, static_cast<int>(a));
                if (t != Dfa::kNone) self(self, t);
            }
        };
        visit(visit, q0);
    }
    std::vector<int> remap(d.num_states(), Dfa::kNone);
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<int>(i);
    Dfa out(d.alphabet());
    for (std::size_t i = 0; i < order.size(); ++i) out.add_state("q" + std::to_string(i), d.is_accepting(order[i]));
    for (int q0 : d.initial()) out.set_initial(remap[q0]);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t a = 0; a < d.num_letters(); ++a) {
            const int t = d.next(order[i], static_cast<int>(a));
            if (t != Dfa::kNone) out.set_transition(static_cast<int>(i), static_cast<int>(a), remap[t]);
        }
    return out;
}

// Hopcroft partition refinement on a total DFA with a single initial state.
inline Dfa minimize(const Dfa& input) {
    const Dfa d = canonical_order(input.totalized());
    if (d.initial().size() != 1) throw InputError("minimisation requires exactly one initial state");
    const int n = static_cast<int>(d.num_states());
    const int k = static_cast<int>(d.num_letters());

    // inverse transitions
    std::vector<std::vector<std::vector<int>>> inv(k, std::vector<std::vector<int>>(n));
    for (int q = 0; q < n; ++q)
        for (int a = 0; a < k; ++a) inv[a][d.next(q, a)].push_back(q);

    std::vector<int> block(n);
    std::vector<std::vector<int>> blocks;
    {
        std::vector<int> acc, rej;
        for (int q = 0; q < n; ++q) (d.is_accepting(q) ? acc : rej).push_back(q);
        for (auto* b : {&acc, &rej})
            if (!b->empty()) {
                for (int q : *b) block[q] = static_cast<int>(blocks.size());
                blocks.push_back(*b);
            }
    }
    std::deque<std::pair<int, int>> work;  // (block, letter)
    std::set<std::pair<int, int>> in_work;
    {
        const int smallest = blocks.size() == 2 && blocks[1].size() < blocks[0].size() ? 1 : 0;
        for (int a = 0; a < k; ++a) {
            work.emplace_back(smallest, a);
            in_work.insert({smallest, a});
        }
    }
    while (!work.empty()) {
        auto [splitter, a] = work.front();
        work.pop_front();
        in_work.erase({splitter, a});
        std::set<int> pre;
        for (int q : blocks[splitter])
            for (int p : inv[a][q]) pre.insert(p);
        std::map<int, std::vector<int>> touched;
        for (int p : pre) touched[block[p]].push_back(p);
        for (auto& [b, inside] : touched) {
            if (inside.size() == blocks[b].size()) continue;
            std::set<int> in_set(inside.begin(), inside.end());
            std::vector<int> outside;
            for (int q : blocks[b])
                if (!in_set.count(q)) outside.push_back(q);
            const int nb = static_cast<int>(blocks.size());
            blocks[b] = inside;
            blocks.push_back(outside);
            for (int q : outside) block[q] = nb;
            for (int c = 0; c < k; ++c) {
                if (in_work.count({b, c})) {
                    work.emplace_back(nb, c);
                    in_work.insert({nb, c});
                } else {
                    const int pick = blocks[b].size() <= blocks[nb].size() ? b : nb;
                    work.emplace_back(pick, c);
                    in_work.insert({pick, c});
                }
            }
        }
    }
    Dfa out(d.alphabet());
    for (std::size_t b = 0; b < blocks.size(); ++b)
        out.add_state("b" + std::to_string(b), d.is_accepting(blocks[b].front()));
    out.set_initial(block[d.initial().front()]);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int a = 0; a < k; ++a) out.set_transition(static_cast<int>(b), a, block[d.next(blocks[b].front(), a)]);
    return canonical_order(out);
}

// Gives every initial state that has incoming transitions a fresh copy with
// identical outgoing edges and no incoming edges, so the first edge of every
// run reads the label of the starting point. The language is unchanged.
inline Dfa anchor_initial(const Dfa& d) {
    std::vector<char> has_incoming(d.num_states(), 0);
    for (std::size_t q = 0; q < d.num_states(); ++q)
        for (std::size_t a = 0; a < d.num_letters(); ++a) {
            const int t = d.next(static_cast<int>(q), static_cast<int>(a));
            if (t != Dfa::kNone) has_incoming[t] = 1;
        }
    bool needed = false;
    for (int q0 : d.initial()) needed = needed || has_incoming[q0];
    if (!needed) return d;

    Dfa out(d.alphabet());
    for (std::size_t q = 0; q < d.num_states(); ++q)
        out.add_state(d.state_name(static_cast<int>(q)), d.is_accepting(static_cast<int>(q)));
    for (std::size_t q = 0; q < d.num_states(); ++q)
        for (std::size_t a = 0; a < d.num_letters(); ++a)
            out.set_transition(static_cast<int>(q), static_cast<int>(a), d.next(static_cast<int>(q), static_cast<int>(a)));
    for (int q0 : d.initial()) {
        if (!has_incoming[q0]) {
            out.set_initial(q0);
            continue;
        }
        std::string name = d.state_name(q0) + "_init";
        const int fresh = out.add_state(name, d.is_accepting(q0));
        for (std::size_t a = 0; a < d.num_letters(); ++a)
            out.set_transition(fresh, static_cast<int>(a), d.next(q0, static_cast<int>(a)));
        out.set_initial(fresh);
    }
    return canonical_order(out);
}

// ---------------------------------------------------------------------------
// Translation by formula progression.
//
// A state is a positive Boolean combination, kept in minimal DNF, of the
// obligations the remaining suffix must satisfy. Obligations are temporal
// subformulas of the positive normal form (G, F, U nodes) plus, for the
// initial state only, literals about the first letter.

struct TranslateOptions {
    std::size_t max_alphabet = 16;
};

namespace detail {

using Cube = std::set<int>;
using Dnf = std::set<Cube>;

inline Dnf dnf_true() { return Dnf{Cube{}}; }

inline Dnf dnf_or(const Dnf& a, const Dnf& b) {
    Dnf out = a;
    out.insert(b.begin(), b.end());
    return out;
}

inline Dnf dnf_and(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& x : a)
        for (const auto& y : b) {
            Cube c = x;
            c.insert(y.begin(), y.end());
            out.insert(std::move(c));
        }
    return out;
}

// Drops cubes that are supersets of other cubes.
inline Dnf absorb(const Dnf& in) {
    Dnf out;
    for (const auto& c : in) {
        bool subsumed = false;
        for (const auto& d : in) {
            if (&c == &d || d.size() >= c.size()) continue;
            if (std::includes(c.begin(), c.end(), d.begin(), d.end())) {
                subsumed = true;
                break;
            }
        }
        if (!subsumed) out.insert(c);
    }
    return out;
}

class Progression {
public:
    explicit Progression(const std::vector<std::string>& alphabet) : alphabet_(alphabet) {}

    int intern(const Formula& f) {
        const std::string key = to_string(f);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        const int id = static_cast<int>(nodes_.size());
        ids_.emplace(key, id);
        nodes_.push_back(f);
        return id;
    }

    // DNF of f over obligations, resolving nothing (used for the initial state).
    Dnf initial(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::True: return dnf_true();
            case FormulaKind::False: return {};
            case FormulaKind::And: return absorb(dnf_and(initial(f.left()), initial(f.right())));
            case FormulaKind::Or: return absorb(dnf_or(initial(f.left()), initial(f.right())));
            default: return Dnf{Cube{intern(f)}};
        }
    }

    // Obligation left for the suffix after reading `letter` against f.
    Dnf progress(const Formula& f, int letter) {
        switch (f.kind()) {
            case FormulaKind::True: return dnf_true();
            case FormulaKind::False: return {};
            case FormulaKind::Atom: return f.name() == alphabet_[letter] ? dnf_true() : Dnf{};
            case FormulaKind::Not: return f.child().name() == alphabet_[letter] ? Dnf{} : dnf_true();
            case FormulaKind::And: return dnf_and(progress(f.left(), letter), progress(f.right(), letter));
            case FormulaKind::Or: return dnf_or(progress(f.left(), letter), progress(f.right(), letter));
            case FormulaKind::Always:
                return dnf_and(progress(f.child(), letter), Dnf{Cube{intern(f)}});
            case FormulaKind::Eventually:
                return dnf_or(progress(f.child(), letter), Dnf{Cube{intern(f)}});
            case FormulaKind::Until:
                return dnf_or(progress(f.right(), letter),
                              dnf_and(progress(f.left(), letter), Dnf{Cube{intern(f)}}));
        }
        return {};
    }

    Dnf step(const Dnf& state, int letter) {
        Dnf out;
        for (const auto& cube : state) {
            Dnf acc = dnf_true();
            for (int ob : cube) {
                const Formula node = nodes_[ob];
                acc = dnf_and(acc, progress(node, letter));
                if (acc.empty()) break;
            }
            out.insert(acc.begin(), acc.end());
        }
        return absorb(out);
    }

    // Whether the obligations hold on the empty remaining suffix.
    bool accepts_empty(const Dnf& state) const {
        for (const auto& cube : state) {
            bool ok = true;
            for (int ob : cube) ok = ok && empty_value(nodes_[ob]);
            if (ok) return true;
        }
        return false;
    }

private:
    static bool empty_value(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::True:
            case FormulaKind::Always:
            case FormulaKind::Not: return true;
            case FormulaKind::And: return empty_value(f.left()) && empty_value(f.right());
            case FormulaKind::Or: return empty_value(f.left()) || empty_value(f.right());
            default: return false;
        }
    }

    const std::vector<std::string>& alphabet_;
    std::map<std::string, int> ids_;
    std::vector<Formula> nodes_;
};

}  // namespace detail

// Minimal DFA accepting exactly the nonempty words over `alphabet` that
// satisfy f. The alphabet is the formula's atoms when none is given.
inline Dfa translate(const Formula& f, std::vector<std::string> alphabet = {}, TranslateOptions opts = {}) {
    for (const auto& a : atoms(f))
        if (std::find(alphabet.begin(), alphabet.end(), a) == alphabet.end()) alphabet.push_back(a);
    if (alphabet.size() > opts.max_alphabet)
        throw AlphabetTooLarge("alphabet of " + std::to_string(alphabet.size()) + " propositions exceeds the cap of " +
                               std::to_string(opts.max_alphabet));
    if (alphabet.empty()) alphabet.push_back("p0");

    detail::Progression prog(alphabet);
    std::map<detail::Dnf, int> ids;
    std::vector<detail::Dnf> states;
    std::vector<std::vector<int>> edges;
    auto get = [&](const detail::Dnf& s) {
        auto [it, inserted] = ids.emplace(s, static_cast<int>(states.size()));
        if (inserted) states.push_back(s);
        return it->second;
    };
    get(prog.initial(to_pnf(f)));
    for (std::size_t s = 0; s < states.size(); ++s) {
        std::vector<int> row(alphabet.size());
        for (std::size_t a = 0; a < alphabet.size(); ++a) row[a] = get(prog.step(states[s], static_cast<int>(a)));
        edges.push_back(std::move(row));
    }

    // The empty word is never a trace, so when the initial state is not
    // re-entered its acceptance bit is free; keep whichever choice minimises.
    bool reentered = false;
    for (const auto& row : edges)
        for (int t : row) reentered = reentered || t == 0;
    auto build = [&](bool initial_accepts) {
        Dfa d(alphabet);
        for (std::size_t s = 0; s < states.size(); ++s)
            d.add_state("s" + std::to_string(s), s == 0 && !reentered ? initial_accepts : prog.accepts_empty(states[s]));
        d.set_initial(0);
        for (std::size_t s = 0; s < states.size(); ++s)
            for (std::size_t a = 0; a < alphabet.size(); ++a)
                d.set_transition(static_cast<int>(s), static_cast<int>(a), edges[s][a]);
        return minimize(d);
    };
    Dfa best = build(false);
    if (!reentered) {
        Dfa alt = build(true);
        if (alt.num_states() < best.num_states()) best = std::move(alt);
    }
    return best;
}

}  // namespace stoverify
