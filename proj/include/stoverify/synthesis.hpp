#pragma once

// Counterexample-guided synthesis of polynomial barrier certificates for a
// single reachability task, rigorous verification, and (gamma, c) search.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "stoverify/generator.hpp"
#include "stoverify/lp.hpp"
#include "stoverify/sampling.hpp"
#include "stoverify/system.hpp"

namespace stoverify {

// Probability that the process started in `source` reaches `target` within
// `horizon`, while confined to `domain`.
struct ReachSpec {
    Predicate source;
    Predicate target;
    Box domain;
    double horizon = 1.0;
};

inline ReachSpec make_reach_spec(const SwitchedSystem& sys, const Predicate& source, const Predicate& target) {
    return ReachSpec{source, target, sys.state_space, sys.horizon};
}

enum class ConstraintKind { Nonnegative, Initial, Unsafe, Generator };

inline const char* to_string(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::Nonnegative: return "nonnegative";
        case ConstraintKind::Initial: return "initial";
        case ConstraintKind::Unsafe: return "unsafe";
        case ConstraintKind::Generator: return "generator";
    }
    return "?";
}

enum class CertificateKind { Common, Multiple };

struct CegisConfig {
    unsigned degree = 4;
    std::size_t initial_samples = 64;
    std::size_t cex_grid_per_axis = 201;
    std::size_t cex_max_grid_points = 40401;
    std::size_t multistarts = 8;
    std::size_t ascent_steps = 40;
    std::size_t cex_per_family = 3;
    std::size_t max_iterations = 80;
    std::size_t verify_grid_per_axis = 32;
    std::size_t verify_max_cells = 300000;
    std::size_t verify_max_depth = 52;
    std::size_t verify_rounds = 4;
    double epsilon = 1e-9;
    double min_slack = 1e-7;
    double coefficient_bound = 1e4;
    double bisection_tolerance = 1e-4;
    std::size_t bisection_cap = 20;
    std::vector<double> c_schedule = {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    std::size_t c_refine_steps = 10;

    void validate() const {
        if (!initial_samples && !cex_grid_per_axis) throw InputError("CEGIS needs samples or a search grid");
        if (cex_grid_per_axis < 2 || !cex_max_grid_points || !max_iterations || !verify_grid_per_axis ||
            !verify_max_cells || !verify_max_depth || !verify_rounds || !bisection_cap || c_schedule.empty())
            throw InputError("CEGIS configuration values must be positive");
        if (!(epsilon >= 0.0) || !(min_slack > 0.0) || !(coefficient_bound > 0.0) || !(bisection_tolerance > 0.0))
            throw InputError("CEGIS tolerances must be positive");
        for (double c : c_schedule)
            if (!(c >= 0.0)) throw InputError("c schedule entries must be non-negative");
    }
};

enum class FailureReason { Infeasible, BudgetExhausted };

inline const char* to_string(FailureReason r) {
    return r == FailureReason::Infeasible ? "infeasible" : "budget_exhausted";
}

struct Failure {
    FailureReason reason = FailureReason::Infeasible;
    std::string detail;
};

struct BarrierCertificate {
    CertificateKind kind = CertificateKind::Common;
    std::vector<CandidateBarrier> barriers;  // one, or one per mode
    std::vector<std::string> mode_ids;       // filled for multiple certificates
    double gamma = 1.0;
    double c = 0.0;
    double horizon = 1.0;
    double epsilon = 0.0;  // verification margin
    bool verified = false;
    bool trivial = false;  // source and target intersect
    std::size_t verify_cells = 0;
    std::size_t cegis_iterations = 0;
    std::size_t samples = 0;

    // gamma + c T, inflated by the verification margin, capped at 1.
    double bound() const { return std::min(1.0, gamma + c * horizon + epsilon * (2.0 + horizon)); }

    std::vector<double> stacked_coefficients() const {
        std::vector<double> a;
        for (const auto& b : barriers) a.insert(a.end(), b.coefficients.begin(), b.coefficients.end());
        return a;
    }
};

struct SynthesisOutcome {
    std::optional<BarrierCertificate> certificate;
    std::optional<Failure> failure;
    bool ok() const { return certificate.has_value(); }
};

struct Counterexample {
    std::vector<double> x;
    std::size_t family = 0;
    ConstraintKind kind = ConstraintKind::Nonnegative;
    std::string constraint;
    double value = 0.0;  // constraint violation g(a, x) > 0
};

enum class VerifyStatus { Verified, CounterexampleFound, Inconclusive };

inline const char* to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::Verified: return "verified";
        case VerifyStatus::CounterexampleFound: return "counterexample";
        case VerifyStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct VerifyResult {
    VerifyStatus status = VerifyStatus::Inconclusive;
    std::optional<Counterexample> counterexample;
    std::size_t cells = 0;
};

// Constraints g(a, x) = sum_i a_i phi_i(x) + offset(gamma, c) <= 0 for x in a region.
struct ConstraintFamily {
    ConstraintKind kind = ConstraintKind::Nonnegative;
    std::string name;
    std::optional<Predicate> region;  // none: the whole domain
    std::vector<Polynomial> phi;
    std::vector<CompiledPolynomial> phi_c;

    double offset(double gamma, double c) const {
        switch (kind) {
            case ConstraintKind::Nonnegative: return 0.0;
            case ConstraintKind::Initial: return -gamma;
            case ConstraintKind::Unsafe: return 1.0;
            case ConstraintKind::Generator: return -c;
        }
        return 0.0;
    }
    Rational exact_offset(double gamma, double c) const {
        switch (kind) {
            case ConstraintKind::Nonnegative: return 0;
            case ConstraintKind::Initial: return -to_rational(gamma);
            case ConstraintKind::Unsafe: return 1;
            case ConstraintKind::Generator: return -to_rational(c);
        }
        return 0;
    }
    bool applies(std::span<const double> x) const { return !region || region->contains(x); }

    Polynomial combine(const std::vector<double>& a, double gamma, double c) const {
        Polynomial g(exact_offset(gamma, c));
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (a[i] != 0.0 && !phi[i].is_zero()) g += Polynomial(to_rational(a[i])) * phi[i];
        return g;
    }
};

// Synthesis state for one reachability task: constraint families, the
// growing sample set (kept across (gamma, c) probes) and the scan grid.
class BarrierProblem {
public:
    BarrierProblem(const ReachSpec& spec, const SwitchedSystem& sys, std::vector<BasisSet> bases, CertificateKind kind,
                   const CegisConfig& cfg)
        : spec_(spec), sys_(sys), bases_(std::move(bases)), kind_(kind), cfg_(cfg) {
        cfg_.validate();
        if (spec_.domain.dimension() != sys_.dimension) throw DimensionMismatch("reach spec and system dimensions differ");
        for (const auto& b : bases_) {
            if (b.empty()) throw InputError("empty basis");
            validate_basis(b);
        }
        if (kind_ == CertificateKind::Common && bases_.size() != 1) throw InputError("a common certificate has one basis");
        if (kind_ == CertificateKind::Multiple) {
            if (!sys_.rates) throw MissingRates("multiple certificates need a transition-rate matrix");
            if (bases_.size() != sys_.modes.size()) throw MissingMode("multiple certificates need one basis per mode");
        }
        build_families();
        build_grid();
        seed_samples();
    }

    std::size_t num_coefficients() const { return ncols_; }
    const std::vector<ConstraintFamily>& families() const { return families_; }
    std::size_t sample_count() const {
        std::size_t n = 0;
        for (const auto& s : samples_) n += s.size();
        return n;
    }
    const ReachSpec& spec() const { return spec_; }
    CertificateKind kind() const { return kind_; }
    const std::vector<BasisSet>& bases() const { return bases_; }

    // Whether source and target visibly intersect.
    bool degenerate() const { return degenerate_; }

    void clear_samples() {
        for (auto& s : samples_) s.clear();
        for (auto& r : rows_) r.clear();
        for (auto& k : keys_) k.clear();
    }

    // Adds x as a sample of every family whose region contains it. Returns
    // whether any family gained a sample.
    bool add_point(const std::vector<double>& x) {
        bool grew = false;
        for (std::size_t f = 0; f < families_.size(); ++f)
            if (families_[f].applies(x)) grew = add_sample(f, x) || grew;
        return grew;
    }

    bool add_sample(std::size_t f, const std::vector<double>& x) {
        if (!keys_[f].insert(x).second) return false;
        samples_[f].push_back(x);
        auto& row = rows_[f];
        for (const auto& p : families_[f].phi_c) row.push_back(p(x.data()));
        return true;
    }

    struct Solution {
        std::vector<double> a;
        double t = 0.0;
    };

    Solution solve(double gamma, double c) const {
        std::vector<double> G, o;
        double constant_slack = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < families_.size(); ++f) {
            const double off = families_[f].offset(gamma, c);
            for (std::size_t s = 0; s < samples_[f].size(); ++s) {
                const auto first = rows_[f].begin() + static_cast<std::ptrdiff_t>(s * ncols_);
                const auto last = first + static_cast<std::ptrdiff_t>(ncols_);
                // a constraint independent of a holds or fails on its own
                if (std::all_of(first, last, [](double v) { return v == 0.0; })) {
                    if (off > 0.0) constant_slack = std::min(constant_slack, -off);
                    continue;
                }
                G.insert(G.end(), first, last);
                o.push_back(off);
            }
        }
        SlackLpOptions lo;
        lo.coefficient_bound = cfg_.coefficient_bound;
        const auto r = max_min_slack(G, o, ncols_, lo);
        return {r.a, std::min(r.t, constant_slack)};
    }

    // Worst violators (g > 0) per family, from the scan grid, the samples and
    // multistart projected gradient ascent.
    std::vector<Counterexample> counterexamples(const std::vector<double>& a, double gamma, double c,
                                                std::size_t per_family) const {
        std::vector<Counterexample> out;
        const std::size_t n = spec_.domain.dimension();
        double width = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) width = std::min(width, spec_.domain.upper[i] - spec_.domain.lower[i]);
        for (std::size_t f = 0; f < families_.size(); ++f) {
            const auto& fam = families_[f];
            const double off = fam.offset(gamma, c);
            // scan
            std::vector<std::pair<double, std::vector<double>>> starts;
            const auto& gp = grid_pts_[f];
            const auto& gv = grid_phi_[f];
            for (std::size_t p = 0; p < gp.size(); ++p) {
                double v = off;
                const double* row = &gv[p * ncols_];
                for (std::size_t i = 0; i < ncols_; ++i) v += a[i] * row[i];
                starts.push_back({v, grid_[gp[p]]});
            }
            for (std::size_t s = 0; s < samples_[f].size(); ++s) {
                double v = off;
                const double* row = &rows_[f][s * ncols_];
                for (std::size_t i = 0; i < ncols_; ++i) v += a[i] * row[i];
                starts.push_back({v, samples_[f][s]});
            }
            if (starts.empty()) continue;
            const std::size_t keep = std::min(starts.size(), cfg_.multistarts);
            std::partial_sort(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(keep), starts.end(),
                              [](const auto& l, const auto& r) { return l.first > r.first; });
            starts.resize(keep);

            const Polynomial g = fam.combine(a, gamma, c);
            const CompiledPolynomial gc(g);
            std::vector<CompiledPolynomial> dg;
            for (std::size_t i = 0; i < n; ++i) dg.emplace_back(g.derivative(i));
            std::vector<std::pair<double, std::vector<double>>> found;
            for (auto& [v0, x0] : starts) {
                std::vector<double> x = x0;
                double v = gc(x.data());
                double step = 0.05 * width;
                std::vector<double> grad(n), y(n);
                for (std::size_t it = 0; it < cfg_.ascent_steps && step > 1e-10 * width; ++it) {
                    double norm = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        grad[i] = dg[i](x.data());
                        norm += grad[i] * grad[i];
                    }
                    norm = std::sqrt(norm);
                    if (!(norm > 0.0)) break;
                    bool moved = false;
                    while (step > 1e-10 * width) {
                        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + step * grad[i] / norm;
                        spec_.domain.clamp(y);
                        const double vy = gc(y.data());
                        if (vy > v && fam.applies(y)) {
                            x = y;
                            v = vy;
                            moved = true;
                            step *= 1.5;
                            break;
                        }
                        step *= 0.5;
                    }
                    if (!moved) break;
                }
                if (v > 0.0) found.push_back({v, x});
            }
            std::sort(found.begin(), found.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
            std::vector<std::vector<double>> chosen;
            for (const auto& [v, x] : found) {
                if (chosen.size() >= per_family) break;
                bool distinct = true;
                for (const auto& y : chosen) {
                    double d = 0.0;
                    for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::fabs(x[i] - y[i]));
                    if (d < 1e-3 * width) distinct = false;
                }
                if (!distinct) continue;
                chosen.push_back(x);
                out.push_back(Counterexample{x, f, fam.kind, fam.name, v});
            }
        }
        std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.value > r.value; });
        return out;
    }

    // Rigorous check of every family on the whole domain by adaptive
    // subdivision: a box is certified when a mean-value (or natural) interval
    // enclosure of g stays <= epsilon; boxes disjoint from the family region
    // are discarded.
    VerifyResult verify(const std::vector<double>& a, double gamma, double c) const {
        VerifyResult res;
        res.status = VerifyStatus::Verified;
        const std::size_t n = spec_.domain.dimension();
        const double eps = cfg_.epsilon;
        std::size_t per_axis = cfg_.verify_grid_per_axis;
        while (per_axis > 1 && std::pow(static_cast<double>(per_axis), static_cast<double>(n)) > 65536.0) --per_axis;

        for (std::size_t f = 0; f < families_.size(); ++f) {
            const auto& fam = families_[f];
            const Polynomial g = fam.combine(a, gamma, c);
            const IntervalPolynomial gi(g);
            const CompiledPolynomial gc(g);
            std::vector<IntervalPolynomial> dgi;
            for (std::size_t i = 0; i < n; ++i) dgi.emplace_back(g.derivative(i));
            std::vector<std::vector<IntervalPolynomial>> cells;
            if (fam.region)
                for (const auto& cell : fam.region->cells) {
                    std::vector<IntervalPolynomial> hs;
                    for (const auto& h : cell) hs.emplace_back(h);
                    cells.push_back(std::move(hs));
                }

            struct Item {
                std::vector<Interval> box;
                std::size_t depth;
            };
            std::vector<Item> stack;
            for (const auto& idx : box_grid(unit_box(n, per_axis), per_axis, 1u << 20)) {
                std::vector<Interval> b(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double lo = spec_.domain.lower[i], hi = spec_.domain.upper[i];
                    const double w = (hi - lo) / static_cast<double>(per_axis);
                    b[i] = Interval(lo + w * idx[i], idx[i] + 1 == static_cast<double>(per_axis) ? hi : lo + w * (idx[i] + 1));
                }
                stack.push_back({std::move(b), 0});
            }
            std::vector<double> center(n), rad(n), mags(n);
            while (!stack.empty()) {
                Item item = std::move(stack.back());
                stack.pop_back();
                ++res.cells;
                const auto& box = item.box;
                if (fam.region) {
                    bool possible = false;
                    for (const auto& hs : cells) {
                        bool ok = true;
                        for (const auto& h : hs)
                            if (h(box).lo > 0.0) {
                                ok = false;
                                break;
                            }
                        if (ok) {
                            possible = true;
                            break;
                        }
                    }
                    if (!possible) continue;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    center[i] = box[i].mid();
                    rad[i] = detail::up(std::max(center[i] - box[i].lo, box[i].hi - center[i]));
                }
                Interval mv(gi.upper_at(center));
                for (std::size_t i = 0; i < n; ++i) {
                    mags[i] = dgi[i](box).mag();
                    mv = mv + Interval(mags[i]) * Interval(rad[i]);
                }
                const double upper = std::min(mv.hi, gi(box).hi);
                if (upper <= eps) continue;
                const double vc = gc(center.data());
                if (vc > eps && fam.applies(center)) {
                    res.status = VerifyStatus::CounterexampleFound;
                    res.counterexample = Counterexample{center, f, fam.kind, fam.name, vc};
                    return res;
                }
                if (res.cells >= cfg_.verify_max_cells || item.depth >= cfg_.verify_max_depth) {
                    res.status = VerifyStatus::Inconclusive;
                    return res;
                }
                std::size_t split = 0;
                double score = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double s = (mags[i] + 1e-300) * rad[i];
                    if (s > score) {
                        score = s;
                        split = i;
                    }
                }
                Item lo{box, item.depth + 1}, hi{box, item.depth + 1};
                lo.box[split].hi = center[split];
                hi.box[split].lo = center[split];
                stack.push_back(std::move(lo));
                stack.push_back(std::move(hi));
            }
        }
        return res;
    }

    BarrierCertificate make_certificate(const std::vector<double>& a, double gamma, double c) const {
        BarrierCertificate cert;
        cert.kind = kind_;
        cert.gamma = gamma;
        cert.c = c;
        cert.horizon = spec_.horizon;
        cert.epsilon = cfg_.epsilon;
        std::size_t off = 0;
        for (const auto& b : bases_) {
            CandidateBarrier cb{b, std::vector<double>(a.begin() + static_cast<std::ptrdiff_t>(off),
                                                       a.begin() + static_cast<std::ptrdiff_t>(off + b.size()))};
            off += b.size();
            cert.barriers.push_back(std::move(cb));
        }
        if (kind_ == CertificateKind::Multiple)
            for (const auto& m : sys_.modes) cert.mode_ids.push_back(m.id);
        cert.samples = sample_count();
        return cert;
    }

    // CEGIS at fixed (gamma, c); the returned certificate is not yet verified.
    SynthesisOutcome cegis(double gamma, double c) {
        for (std::size_t it = 1; it <= cfg_.max_iterations; ++it) {
            const Solution s = solve(gamma, c);
            if (!(s.t > cfg_.min_slack))
                return {std::nullopt, Failure{FailureReason::Infeasible, "no coefficients satisfy the sampled constraints"}};
            const auto cex = counterexamples(s.a, gamma, c, cfg_.cex_per_family);
            if (cex.empty()) {
                auto cert = make_certificate(s.a, gamma, c);
                cert.cegis_iterations = it;
                return {cert, std::nullopt};
            }
            bool grew = false;
            for (const auto& e : cex) grew = add_point(e.x) || grew;
            if (!grew) return {std::nullopt, Failure{FailureReason::BudgetExhausted, "counterexamples repeat known samples"}};
        }
        return {std::nullopt, Failure{FailureReason::BudgetExhausted, "CEGIS iteration cap reached"}};
    }

    // CEGIS followed by verification; verifier counterexamples are fed back.
    SynthesisOutcome synthesize(double gamma, double c) {
        if (degenerate_) return {trivial_certificate(), std::nullopt};
        for (std::size_t round = 0; round < cfg_.verify_rounds; ++round) {
            auto out = cegis(gamma, c);
            if (!out.ok()) return out;
            auto& cert = *out.certificate;
            const auto a = cert.stacked_coefficients();
            const auto v = verify(a, gamma, c);
            cert.verify_cells = v.cells;
            if (v.status == VerifyStatus::Verified) {
                cert.verified = true;
                return out;
            }
            if (v.status == VerifyStatus::Inconclusive)
                return {std::nullopt, Failure{FailureReason::BudgetExhausted, "verification budget exhausted"}};
            if (!add_point(v.counterexample->x))
                return {std::nullopt, Failure{FailureReason::BudgetExhausted, "verifier counterexample already sampled"}};
        }
        return {std::nullopt, Failure{FailureReason::BudgetExhausted, "verification rounds exhausted"}};
    }

    // B = 1 with gamma = 1, c = 0: valid whenever nothing better is known.
    BarrierCertificate trivial_certificate() const {
        std::vector<double> a(ncols_, 0.0);
        std::size_t off = 0;
        for (const auto& b : bases_) {
            for (std::size_t i = 0; i < b.size(); ++i)
                if (b[i] == Polynomial(1)) a[off + i] = 1.0;
            off += b.size();
        }
        auto cert = make_certificate(a, 1.0, 0.0);
        cert.epsilon = 0.0;
        cert.verified = true;
        cert.trivial = true;
        return cert;
    }

private:
    static Box unit_box(std::size_t n, std::size_t per_axis) {
        return Box{std::vector<double>(n, 0.0), std::vector<double>(n, static_cast<double>(per_axis - 1))};
    }

    void build_families() {
        const auto& modes = sys_.modes;
        const std::size_t nm = modes.size();
        ncols_ = 0;
        for (const auto& b : bases_) ncols_ += b.size();
        auto block = [&](std::size_t which, auto&& fn) {
            std::vector<Polynomial> phi(ncols_);
            std::size_t off = 0;
            for (std::size_t q = 0; q < bases_.size(); ++q) {
                for (std::size_t i = 0; i < bases_[q].size(); ++i) phi[off + i] = fn(q, bases_[q][i]);
                off += bases_[q].size();
            }
            (void)which;
            return phi;
        };
        auto add = [&](ConstraintKind k, std::string name, std::optional<Predicate> region, std::vector<Polynomial> phi) {
            ConstraintFamily f;
            f.kind = k;
            f.name = std::move(name);
            f.region = std::move(region);
            f.phi = std::move(phi);
            for (const auto& p : f.phi) f.phi_c.emplace_back(p);
            families_.push_back(std::move(f));
        };
        if (kind_ == CertificateKind::Common) {
            add(ConstraintKind::Nonnegative, "nonnegative", std::nullopt,
                block(0, [](std::size_t, const Polynomial& b) { return -b; }));
            add(ConstraintKind::Initial, "initial", spec_.source, block(0, [](std::size_t, const Polynomial& b) { return b; }));
            add(ConstraintKind::Unsafe, "unsafe", spec_.target, block(0, [](std::size_t, const Polynomial& b) { return -b; }));
            for (std::size_t m = 0; m < nm; ++m)
                add(ConstraintKind::Generator, "generator[" + modes[m].id + "]", std::nullopt,
                    block(m, [&](std::size_t, const Polynomial& b) { return apply_generator(b, modes[m]); }));
        } else {
            const auto& lam = *sys_.rates;
            for (std::size_t m = 0; m < nm; ++m) {
                const std::string tag = "[" + modes[m].id + "]";
                auto own = [m](Polynomial (*f)(const Polynomial&)) {
                    return [m, f](std::size_t q, const Polynomial& b) { return q == m ? f(b) : Polynomial(); };
                };
                add(ConstraintKind::Nonnegative, "nonnegative" + tag, std::nullopt,
                    block(m, own([](const Polynomial& b) { return -b; })));
                add(ConstraintKind::Initial, "initial" + tag, spec_.source,
                    block(m, own([](const Polynomial& b) { return b; })));
                add(ConstraintKind::Unsafe, "unsafe" + tag, spec_.target,
                    block(m, own([](const Polynomial& b) { return -b; })));
                add(ConstraintKind::Generator, "generator" + tag, std::nullopt,
                    block(m, [&](std::size_t q, const Polynomial& b) {
                        Polynomial p = lam[m][q] * b;
                        if (q == m) p += apply_generator(b, modes[m]);
                        return p;
                    }));
            }
        }
        samples_.assign(families_.size(), {});
        rows_.assign(families_.size(), {});
        keys_.assign(families_.size(), {});
    }

    void build_grid() {
        grid_ = box_grid(spec_.domain, cfg_.cex_grid_per_axis, cfg_.cex_max_grid_points);
        grid_pts_.assign(families_.size(), {});
        grid_phi_.assign(families_.size(), {});
        // families over the whole domain with the same phi share nothing; the
        // memory is proportional to the grid size times the coefficient count
        for (std::size_t f = 0; f < families_.size(); ++f) {
            const auto& fam = families_[f];
            for (std::size_t p = 0; p < grid_.size(); ++p) {
                if (!fam.applies(grid_[p])) continue;
                grid_pts_[f].push_back(p);
                for (const auto& ph : fam.phi_c) grid_phi_[f].push_back(ph(grid_[p].data()));
            }
        }
    }

    void seed_samples() {
        const auto src = sample_predicate(spec_.source, spec_.domain, cfg_.initial_samples);
        const auto tgt = sample_predicate(spec_.target, spec_.domain, cfg_.initial_samples);
        const auto all = sample_box(spec_.domain, cfg_.initial_samples);
        for (const auto& x : src)
            if (spec_.target.contains(x)) degenerate_ = true;
        for (const auto& x : tgt)
            if (spec_.source.contains(x)) degenerate_ = true;
        for (const auto* set : {&src, &tgt, &all})
            for (const auto& x : *set) add_point(x);
    }

    ReachSpec spec_;
    const SwitchedSystem& sys_;
    std::vector<BasisSet> bases_;
    CertificateKind kind_;
    CegisConfig cfg_;
    std::size_t ncols_ = 0;
    std::vector<ConstraintFamily> families_;
    std::vector<std::vector<std::vector<double>>> samples_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::set<std::vector<double>>> keys_;
    std::vector<std::vector<double>> grid_;
    std::vector<std::vector<std::size_t>> grid_pts_;
    std::vector<std::vector<double>> grid_phi_;
    bool degenerate_ = false;
};

// Feasibility on a fixed sample set: coefficients satisfying every
// sampled constraint with maximal minimum slack, or nullopt when infeasible.
inline std::optional<std::vector<double>> feasibility_solve(const std::vector<std::vector<double>>& samples,
                                                            const ReachSpec& spec, const SwitchedSystem& sys,
                                                            const BasisSet& basis, double gamma, double c,
                                                            CegisConfig cfg = {}) {
    cfg.initial_samples = 0;
    BarrierProblem prob(spec, sys, {basis}, CertificateKind::Common, cfg);
    prob.clear_samples();
    for (const auto& x : samples) prob.add_point(x);
    const auto s = prob.solve(gamma, c);
    if (!(s.t > 0.0)) return std::nullopt;
    return s.a;
}

inline std::optional<Counterexample> find_counterexample(const std::vector<double>& a, const ReachSpec& spec,
                                                         const SwitchedSystem& sys, const BasisSet& basis, double gamma,
                                                         double c, CegisConfig cfg = {}) {
    cfg.initial_samples = 0;
    BarrierProblem prob(spec, sys, {basis}, CertificateKind::Common, cfg);
    prob.clear_samples();
    auto cex = prob.counterexamples(a, gamma, c, 1);
    if (cex.empty()) return std::nullopt;
    return cex.front();
}

inline SynthesisOutcome cegis(const ReachSpec& spec, const SwitchedSystem& sys, const BasisSet& basis, double gamma,
                              double c, const CegisConfig& cfg = {}) {
    BarrierProblem prob(spec, sys, {basis}, CertificateKind::Common, cfg);
    return prob.cegis(gamma, c);
}

inline SynthesisOutcome cegis_multiple(const ReachSpec& spec, const SwitchedSystem& sys,
                                       const std::vector<BasisSet>& bases, double gamma, double c,
                                       const CegisConfig& cfg = {}) {
    BarrierProblem prob(spec, sys, bases, CertificateKind::Multiple, cfg);
    return prob.cegis(gamma, c);
}

inline std::vector<BasisSet> certificate_bases(const BarrierCertificate& cert) {
    std::vector<BasisSet> out;
    for (const auto& b : cert.barriers) out.push_back(b.basis);
    return out;
}

inline VerifyResult verify_barrier(const BarrierCertificate& cert, const ReachSpec& spec, const SwitchedSystem& sys,
                                   CegisConfig cfg = {}) {
    cfg.initial_samples = 0;
    cfg.cex_grid_per_axis = 2;
    cfg.cex_max_grid_points = 1u << 20;
    BarrierProblem prob(spec, sys, certificate_bases(cert), cert.kind, cfg);
    return prob.verify(cert.stacked_coefficients(), cert.gamma, cert.c);
}

struct BoundSearch {
    std::size_t probes = 0;
};

namespace detail {

// Smallest gamma on [0, hi] admitting a verified certificate at this c.
inline std::optional<BarrierCertificate> bisect_gamma(BarrierProblem& prob, double c, double hi, const CegisConfig& cfg,
                                                      std::size_t& probes) {
    if (!(hi > 0.0)) return std::nullopt;
    ++probes;
    auto top = prob.synthesize(hi, c);
    if (!top.ok()) return std::nullopt;
    BarrierCertificate best = *top.certificate;
    if (best.trivial) return best;
    double lo = 0.0;
    for (std::size_t it = 0; it < cfg.bisection_cap && hi - lo > cfg.bisection_tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        ++probes;
        auto r = prob.synthesize(mid, c);
        if (r.ok()) {
            hi = mid;
            best = *r.certificate;
        } else {
            lo = mid;
        }
    }
    return best;
}

}  // namespace detail

// Nested search: c over a geometric schedule (then golden-section refinement
// around the best schedule point), gamma by bisection, minimizing gamma + c T.
inline SynthesisOutcome minimize_bound(BarrierProblem& prob, const CegisConfig& cfg, BoundSearch* stats = nullptr) {
    std::size_t probes = 0;
    const double T = prob.spec().horizon;
    if (prob.degenerate()) return {prob.trivial_certificate(), std::nullopt};
    std::optional<BarrierCertificate> best;
    auto value = [&](const BarrierCertificate& c) { return c.gamma + c.c * T; };
    auto try_c = [&](double c) -> double {
        const double limit = best ? value(*best) : 1.0;
        if (c * T >= limit) return std::numeric_limits<double>::infinity();
        auto cert = detail::bisect_gamma(prob, c, std::min(1.0, limit - c * T), cfg, probes);
        if (!cert) return std::numeric_limits<double>::infinity();
        const double v = value(*cert);
        if (!best || v < value(*best)) best = *cert;
        return v;
    };
    std::vector<double> sched = cfg.c_schedule;
    std::sort(sched.begin(), sched.end());
    std::vector<double> vals;
    for (double c : sched) vals.push_back(try_c(c));
    if (!best) {
        if (stats) stats->probes = probes;
        return {std::nullopt, Failure{FailureReason::Infeasible, "no (gamma, c) pair on the schedule admits a certificate"}};
    }
    // golden-section refinement of c between the neighbours of the best point
    const auto it = std::min_element(vals.begin(), vals.end());
    const std::size_t j = static_cast<std::size_t>(it - vals.begin());
    double a = j > 0 ? sched[j - 1] : sched[j];
    double b = j + 1 < sched.size() ? sched[j + 1] : sched[j];
    if (b > a && cfg.c_refine_steps > 0) {
        const double r = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - r * (b - a), x2 = a + r * (b - a);
        double f1 = try_c(x1), f2 = try_c(x2);
        for (std::size_t s = 2; s < cfg.c_refine_steps; ++s) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = try_c(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = try_c(x2);
            }
        }
    }
    if (stats) stats->probes = probes;
    return {best, std::nullopt};
}

inline SynthesisOutcome minimize_bound(const ReachSpec& spec, const SwitchedSystem& sys, const BasisSet& basis,
                                       const CegisConfig& cfg = {}, BoundSearch* stats = nullptr) {
    BarrierProblem prob(spec, sys, {basis}, CertificateKind::Common, cfg);
    return minimize_bound(prob, cfg, stats);
}

inline SynthesisOutcome minimize_bound_multiple(const ReachSpec& spec, const SwitchedSystem& sys,
                                                const std::vector<BasisSet>& bases, const CegisConfig& cfg = {},
                                                BoundSearch* stats = nullptr) {
    BarrierProblem prob(spec, sys, bases, CertificateKind::Multiple, cfg);
    return minimize_bound(prob, cfg, stats);
}

inline nlohmann::json certificate_to_json(const BarrierCertificate& cert) {
    nlohmann::json j;
    j["kind"] = cert.kind == CertificateKind::Common ? "common" : "multiple";
    j["gamma"] = cert.gamma;
    j["c"] = cert.c;
    j["horizon"] = cert.horizon;
    j["epsilon"] = cert.epsilon;
    j["bound"] = cert.bound();
    j["verified"] = cert.verified;
    j["trivial"] = cert.trivial;
    j["verification"] = "interval enclosure over adaptive subdivision of the state space";
    j["verify_cells"] = cert.verify_cells;
    j["cegis_iterations"] = cert.cegis_iterations;
    j["samples"] = cert.samples;
    nlohmann::json bs = nlohmann::json::array();
    for (std::size_t q = 0; q < cert.barriers.size(); ++q) {
        nlohmann::json b;
        if (cert.kind == CertificateKind::Multiple && q < cert.mode_ids.size()) b["mode"] = cert.mode_ids[q];
        nlohmann::json basis = nlohmann::json::array();
        for (const auto& p : cert.barriers[q].basis) basis.push_back(to_string(p));
        b["basis"] = basis;
        b["coefficients"] = cert.barriers[q].coefficients;
        b["polynomial"] = to_string(cert.barriers[q].polynomial());
        bs.push_back(b);
    }
    j["barriers"] = bs;
    return j;
}

inline BarrierCertificate certificate_from_json(const nlohmann::json& j) {
    BarrierCertificate c;
    try {
        c.kind = j.at("kind").get<std::string>() == "multiple" ? CertificateKind::Multiple : CertificateKind::Common;
        c.gamma = j.at("gamma").get<double>();
        c.c = j.at("c").get<double>();
        c.horizon = j.at("horizon").get<double>();
        c.epsilon = j.value("epsilon", 0.0);
        c.verified = j.value("verified", false);
        c.trivial = j.value("trivial", false);
        for (const auto& b : j.at("barriers")) {
            CandidateBarrier cb;
            for (const auto& p : b.at("basis")) cb.basis.push_back(parse_polynomial(p.get<std::string>()));
            cb.coefficients = b.at("coefficients").get<std::vector<double>>();
            if (cb.basis.size() != cb.coefficients.size()) throw SchemaError("certificate basis and coefficients differ in size");
            if (b.contains("mode")) c.mode_ids.push_back(b.at("mode").get<std::string>());
            c.barriers.push_back(std::move(cb));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed certificate: ") + e.what());
    }
    return c;
}

}  // namespace stoverify
