#pragma once

// Combining per-triple reachability bounds into per-proposition bounds, and
// the verification report built from them.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stoverify/decomposition.hpp"
#include "stoverify/synthesis.hpp"

namespace stoverify {

enum class BoundStatus { Verified, AssumedOne };

inline const char* to_string(BoundStatus s) { return s == BoundStatus::Verified ? "verified" : "assumed_one"; }

struct TripleBound {
    ReachTriple triple;
    std::vector<std::string> source;  // propositions whose regions form the source set
    std::vector<std::string> target;
    double gamma = 1.0;
    double c = 0.0;
    double bound = 1.0;
    BoundStatus status = BoundStatus::AssumedOne;
    std::optional<BarrierCertificate> certificate;
    std::string note;  // failure reason for assumed_one rows

    static TripleBound assumed_one(ReachTriple t, std::string note = {}) {
        TripleBound b;
        b.triple = std::move(t);
        b.note = std::move(note);
        return b;
    }

    static TripleBound from_certificate(ReachTriple t, BarrierCertificate cert) {
        TripleBound b;
        b.triple = std::move(t);
        b.gamma = cert.gamma;
        b.c = cert.c;
        b.bound = std::clamp(cert.bound(), 0.0, 1.0);
        b.status = BoundStatus::Verified;
        b.certificate = std::move(cert);
        return b;
    }

    // Bound given directly, e.g. a previously published value.
    static TripleBound with_bound(ReachTriple t, double gamma, double c, double bound) {
        TripleBound b;
        b.triple = std::move(t);
        b.gamma = gamma;
        b.c = c;
        b.bound = std::clamp(bound, 0.0, 1.0);
        b.status = BoundStatus::Verified;
        return b;
    }
};

using TripleBounds = std::map<ReachTriple, TripleBound>;

struct RunBreakdown {
    AcceptingRun run;
    std::vector<double> factors;
    double product = 1.0;
    bool nontrivial = false;  // some factor is below one
};

struct AssembledBound {
    std::string prop;
    double upper_violation = 1.0;
    double lower_satisfaction = 0.0;
    std::vector<RunBreakdown> runs;
};

inline double assemble_lower(double upper) { return std::max(0.0, 1.0 - std::clamp(upper, 0.0, 1.0)); }

inline AssembledBound assemble(const Dfa& d, const std::string& prop, const std::vector<AcceptingRun>& runs,
                               const TripleBounds& bounds) {
    AssembledBound out;
    out.prop = prop;
    double sum = 0.0;
    for (const auto& r : runs) {
        RunBreakdown rb;
        rb.run = r;
        for (const auto& t : triples(d, r)) {
            auto it = bounds.find(t);
            const double f = it == bounds.end() ? 1.0 : std::clamp(it->second.bound, 0.0, 1.0);
            rb.factors.push_back(f);
            rb.product *= f;
            if (f < 1.0) rb.nontrivial = true;
        }
        sum += rb.product;
        out.runs.push_back(std::move(rb));
    }
    out.upper_violation = std::clamp(sum, 0.0, 1.0);
    out.lower_satisfaction = assemble_lower(out.upper_violation);
    return out;
}

inline double assemble_upper(const Dfa& d, const std::vector<AcceptingRun>& runs, const TripleBounds& bounds) {
    return assemble(d, "", runs, bounds).upper_violation;
}

struct VerificationReport {
    std::string formula;
    std::string negated;
    double horizon = 0.0;
    Dfa dfa;
    std::vector<AssembledBound> propositions;  // alphabet order
    std::vector<TripleBound> rows;             // unique (triple, source, target)
    nlohmann::json settings = nlohmann::json::object();

    const AssembledBound& at(const std::string& p) const {
        for (const auto& a : propositions)
            if (a.prop == p) return a;
        throw Error("no bound for proposition '" + p + "'");
    }
};

// per_prop maps each proposition to the bounds used for its runs.
inline VerificationReport build_report(const Decomposition& dec, const std::map<std::string, TripleBounds>& per_prop,
                                       double horizon) {
    VerificationReport rep{{}, {}, horizon, dec.dfa, {}, {}, nlohmann::json::object()};
    static const TripleBounds none;
    for (const auto& [p, runs] : dec.runs_by_prop) {
        auto it = per_prop.find(p);
        const TripleBounds& b = it == per_prop.end() ? none : it->second;
        rep.propositions.push_back(assemble(dec.dfa, p, runs, b));
        for (const auto& run : runs)
            for (const auto& t : triples(dec.dfa, run)) {
                auto bt = b.find(t);
                TripleBound row = bt == b.end() ? TripleBound::assumed_one(t, "no certificate") : bt->second;
                const bool dup = std::any_of(rep.rows.begin(), rep.rows.end(), [&](const TripleBound& r) {
                    return r.triple == row.triple && r.source == row.source && r.target == row.target;
                });
                if (!dup) rep.rows.push_back(std::move(row));
            }
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const TripleBound& a, const TripleBound& b) {
        return std::tie(a.triple, a.source, a.target) < std::tie(b.triple, b.source, b.target);
    });
    return rep;
}

namespace detail {

inline std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Shortest text that reads back as the same double.
inline std::string exact(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

inline std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

}  // namespace detail

inline std::string format_report_text(const VerificationReport& rep) {
    std::ostringstream out;
    if (!rep.formula.empty()) out << "formula:  " << rep.formula << '\n';
    if (!rep.negated.empty()) out << "negation: " << rep.negated << '\n';
    out << "horizon:  " << detail::num(rep.horizon) << "\n\n";

    std::vector<std::vector<std::string>> cells = {{"triple", "source", "target", "c", "gamma", "gamma+cT", "status"}};
    for (const auto& r : rep.rows)
        cells.push_back({format_triple(rep.dfa, r.triple), detail::join(r.source, "|"), detail::join(r.target, "|"),
                         detail::num(r.c), detail::num(r.gamma), detail::num(r.bound), to_string(r.status)});
    std::vector<std::size_t> w(cells[0].size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) w[i] = std::max(w[i], row[i].size());
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) line += detail::pad(row[i], w[i] + 2);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    }
    out << '\n';
    for (const auto& a : rep.propositions) {
        out << a.prop << ": P(violation) <= " << detail::num(a.upper_violation, 8)
            << ", P(satisfaction) >= " << detail::num(a.lower_satisfaction, 8) << '\n';
        for (const auto& r : a.runs) {
            out << "    " << format_run(rep.dfa, r.run) << "  product " << detail::num(r.product, 8);
            if (!r.nontrivial) out << "  (no certificate below 1)";
            out << '\n';
        }
    }
    out << "\nSwitching is arbitrary; the bounds hold for every switching signal.\n";
    return out.str();
}

inline std::string format_report_csv(const VerificationReport& rep) {
    std::ostringstream out;
    out << "triple,gamma,c,bound,status\n";
    for (const auto& r : rep.rows) {
        std::string name = format_triple(rep.dfa, r.triple);
        out << '"' << name << "\"," << detail::exact(r.gamma) << ',' << detail::exact(r.c) << ','
            << detail::exact(r.bound) << ',' << to_string(r.status) << '\n';
    }
    return out.str();
}

inline nlohmann::json report_to_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["formula"] = rep.formula;
    j["negated"] = rep.negated;
    j["horizon"] = rep.horizon;
    j["dfa"] = format_dfa(rep.dfa);
    j["settings"] = rep.settings;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        nlohmann::json row;
        row["triple"] = format_triple(rep.dfa, r.triple);
        row["source"] = r.source;
        row["target"] = r.target;
        row["gamma"] = r.gamma;
        row["c"] = r.c;
        row["bound"] = r.bound;
        row["status"] = to_string(r.status);
        if (!r.note.empty()) row["note"] = r.note;
        if (r.certificate) row["certificate"] = certificate_to_json(*r.certificate);
        rows.push_back(row);
    }
    j["triples"] = rows;
    nlohmann::json props = nlohmann::json::object();
    for (const auto& a : rep.propositions) {
        nlohmann::json p;
        p["upper_violation"] = a.upper_violation;
        p["lower_satisfaction"] = a.lower_satisfaction;
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : a.runs)
            runs.push_back({{"run", format_run(rep.dfa, r.run)},
                            {"factors", r.factors},
                            {"product", r.product},
                            {"nontrivial", r.nontrivial}});
        p["runs"] = runs;
        props[a.prop] = p;
    }
    j["propositions"] = props;
    j["mc_checks"] = nlohmann::json::array();
    return j;
}

// Lower satisfaction bounds read back from a report document.
inline std::map<std::string, double> lower_bounds_from_json(const nlohmann::json& j) {
    std::map<std::string, double> out;
    try {
        for (const auto& [p, v] : j.at("propositions").items()) out[p] = v.at("lower_satisfaction").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed report: ") + e.what());
    }
    return out;
}

}  // namespace stoverify
