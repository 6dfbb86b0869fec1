#pragma once

// Euler-Maruyama simulation of the switched SDE under switching policies,
// trace extraction, and Monte Carlo estimates with exact binomial intervals.

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stoverify/dfa.hpp"
#include "stoverify/ltl.hpp"
#include "stoverify/parallel.hpp"
#include "stoverify/sampling.hpp"
#include "stoverify/system.hpp"

namespace stoverify {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed of the index-th independent stream derived from a master seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

struct CompiledPredicate {
    std::vector<std::vector<CompiledPolynomial>> cells;

    CompiledPredicate() = default;
    explicit CompiledPredicate(const Predicate& p) {
        for (const auto& c : p.cells) {
            std::vector<CompiledPolynomial> cc;
            for (const auto& h : c) cc.emplace_back(h);
            cells.push_back(std::move(cc));
        }
    }
    // <= 0 exactly on the predicate
    double score(const double* x) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : cells) {
            double worst = -std::numeric_limits<double>::infinity();
            for (const auto& h : c) worst = std::max(worst, h(x));
            if (c.empty()) worst = 0.0;
            best = std::min(best, worst);
        }
        return best;
    }
    bool contains(const double* x) const { return score(x) <= 0.0; }
};

// Double-precision copy of the dynamics and labelling for the hot loop.
struct CompiledSystem {
    std::size_t n = 0, r = 0;
    Box box;
    std::vector<std::vector<CompiledPolynomial>> drift;      // [mode][i]
    std::vector<std::vector<CompiledPolynomial>> diffusion;  // [mode][i * r + k]
    std::vector<std::vector<CompiledPolynomial>> regions;    // declared regions, in order
    std::vector<std::string> props;                          // declared props, then the complement
    std::optional<std::vector<std::vector<CompiledPolynomial>>> rates;

    explicit CompiledSystem(const SwitchedSystem& sys)
        : n(sys.dimension), r(sys.noise_dimension), box(sys.state_space) {
        for (const auto& m : sys.modes) {
            std::vector<CompiledPolynomial> f, g;
            for (const auto& p : m.drift) f.emplace_back(p);
            for (const auto& row : m.diffusion)
                for (const auto& p : row) g.emplace_back(p);
            drift.push_back(std::move(f));
            diffusion.push_back(std::move(g));
        }
        for (const auto& reg : sys.regions) {
            if (reg.is_complement) continue;
            std::vector<CompiledPolynomial> hs;
            for (const auto& h : reg.inequalities) hs.emplace_back(h);
            regions.push_back(std::move(hs));
            props.push_back(reg.prop);
        }
        props.push_back(sys.complement_prop);
        if (sys.rates) {
            rates.emplace();
            for (const auto& row : *sys.rates) {
                std::vector<CompiledPolynomial> cr;
                for (const auto& p : row) cr.emplace_back(p);
                rates->push_back(std::move(cr));
            }
        }
    }

    std::size_t num_modes() const { return drift.size(); }

    // Index into props of the label of x.
    std::size_t label_index(const double* x) const {
        for (std::size_t k = 0; k < regions.size(); ++k) {
            bool in = true;
            for (const auto& h : regions[k])
                if (!(h(x) <= 0.0)) {
                    in = false;
                    break;
                }
            if (in) return k;
        }
        return regions.size();
    }
};

enum class PolicyKind { Constant, RandomDwell, MarkovJump, Adversarial };

struct SwitchingPolicy {
    PolicyKind kind = PolicyKind::Constant;
    std::size_t mode = 0;     // constant
    double mean_dwell = 0.1;  // random dwell: exponential holding times

    static SwitchingPolicy constant(std::size_t m) { return {PolicyKind::Constant, m, 0.0}; }
    static SwitchingPolicy random_dwell(double mean) { return {PolicyKind::RandomDwell, 0, mean}; }
    static SwitchingPolicy markov_jump() { return {PolicyKind::MarkovJump, 0, 0.0}; }
    static SwitchingPolicy adversarial() { return {PolicyKind::Adversarial, 0, 0.0}; }

    std::string name(const SwitchedSystem& sys) const {
        switch (kind) {
            case PolicyKind::Constant: return "constant:" + sys.modes.at(mode).id;
            case PolicyKind::RandomDwell: {
                std::ostringstream s;
                s << "dwell:" << mean_dwell;
                return s.str();
            }
            case PolicyKind::MarkovJump: return "markov";
            case PolicyKind::Adversarial: return "adversarial";
        }
        return "?";
    }
};

// Constant per mode, random dwell at two time scales, the rate-driven chain
// when rates exist, and greedy steering.
inline std::vector<SwitchingPolicy> policy_battery(const SwitchedSystem& sys) {
    std::vector<SwitchingPolicy> out;
    for (std::size_t m = 0; m < sys.modes.size(); ++m) out.push_back(SwitchingPolicy::constant(m));
    if (sys.modes.size() > 1) {
        out.push_back(SwitchingPolicy::random_dwell(0.1 * sys.horizon));
        out.push_back(SwitchingPolicy::random_dwell(0.01 * sys.horizon));
    }
    if (sys.rates) out.push_back(SwitchingPolicy::markov_jump());
    out.push_back(SwitchingPolicy::adversarial());
    return out;
}

// Supplies the set the adversarial policy steers toward, given the label of
// the current state; nullptr means no preference.
class Steering {
public:
    virtual ~Steering() = default;
    virtual const CompiledPredicate* target(std::size_t label) = 0;
};

class FixedTarget : public Steering {
public:
    explicit FixedTarget(const CompiledPredicate& p) : p_(&p) {}
    const CompiledPredicate* target(std::size_t) override { return p_; }

private:
    const CompiledPredicate* p_;
};

struct SimulationConfig {
    double dt = 1e-2;
    double horizon = 0.0;         // 0: the system's horizon
    std::size_t max_word = 1024;  // longer traces count as chattering
};

inline std::size_t step_count(double horizon, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
    if (!(horizon > 0.0)) throw InputError("horizon must be positive");
    const double q = horizon / dt;
    const double steps = std::round(q);
    if (steps < 1.0 || std::fabs(q - steps) > 1e-6 * std::max(1.0, q))
        throw InputError("time step must divide the horizon");
    return static_cast<std::size_t>(steps);
}

// Largest total jump probability per step over a grid of the state space.
inline double max_jump_probability(const CompiledSystem& cs, double dt, std::size_t per_axis = 21) {
    if (!cs.rates) return 0.0;
    double worst = 0.0;
    for (const auto& x : box_grid(cs.box, per_axis, 100000))
        for (std::size_t m = 0; m < cs.num_modes(); ++m) {
            double s = 0.0;
            for (std::size_t k = 0; k < cs.num_modes(); ++k)
                if (k != m) s += (*cs.rates)[m][k](x.data());
            worst = std::max(worst, s * dt);
        }
    return worst;
}

inline void check_policy(const CompiledSystem& cs, const SwitchingPolicy& p, double dt) {
    if (p.kind == PolicyKind::Constant && p.mode >= cs.num_modes()) throw MissingMode("constant policy mode out of range");
    if (p.kind == PolicyKind::RandomDwell && !(p.mean_dwell > 0.0)) throw InputError("mean dwell time must be positive");
    if (p.kind == PolicyKind::MarkovJump) {
        if (!cs.rates) throw MissingRates("the markov policy needs switching rates");
        if (max_jump_probability(cs, dt) > 0.1) throw StepTooLarge("time step too large for the switching rates");
    }
}

// Observer called at every grid time j = 0..steps with the state and the mode
// used on [t_j, t_j+1). Returning false ends the path early.
using StepObserver = std::function<bool(std::size_t j, const double* x, std::size_t mode, bool stopped)>;

namespace detail {

inline std::size_t greedy_mode(const CompiledSystem& cs, const CompiledPredicate& target, const double* x, double dt,
                               std::size_t current, std::vector<double>& y) {
    std::size_t best = current;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < cs.num_modes(); ++m) {
        for (std::size_t i = 0; i < cs.n; ++i) y[i] = x[i] + cs.drift[m][i](x) * dt;
        const double s = target.score(y.data());
        if (s < best_score || (s == best_score && m == current)) {
            best_score = s;
            best = m;
        }
    }
    return best;
}

}  // namespace detail

// One path of the stopped process. Deterministic given the seed.
inline void simulate_path(const CompiledSystem& cs, const SwitchingPolicy& policy, std::span<const double> x0, double dt,
                          std::size_t steps, std::uint64_t seed, Steering* steering, const StepObserver& observe) {
    if (x0.size() != cs.n) throw DimensionMismatch("initial state has the wrong dimension");
    if (!cs.box.contains(x0)) throw OutOfStateSpace("initial state lies outside the state space");
    if (policy.kind == PolicyKind::Adversarial && !steering) throw InputError("the adversarial policy needs a target");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t M = cs.num_modes();
    auto draw_mode = [&] { return std::min<std::size_t>(M - 1, static_cast<std::size_t>(unif(rng) * M)); };

    std::vector<double> x(x0.begin(), x0.end()), y(cs.n), z(cs.r);
    std::size_t mode = 0;
    double next_switch = std::numeric_limits<double>::infinity();
    switch (policy.kind) {
        case PolicyKind::Constant: mode = policy.mode; break;
        case PolicyKind::RandomDwell:
            mode = draw_mode();
            next_switch = -policy.mean_dwell * std::log1p(-unif(rng));
            break;
        case PolicyKind::MarkovJump: mode = draw_mode(); break;
        case PolicyKind::Adversarial: break;
    }
    const double sq = std::sqrt(dt);
    bool stopped = false;
    for (std::size_t j = 0;; ++j) {
        const double t = static_cast<double>(j) * dt;
        if (!stopped) {
            if (policy.kind == PolicyKind::RandomDwell) {
                while (t >= next_switch) {
                    mode = draw_mode();
                    next_switch += -policy.mean_dwell * std::log1p(-unif(rng));
                }
            } else if (policy.kind == PolicyKind::Adversarial && steering) {
                if (const auto* tgt = steering->target(cs.label_index(x.data())))
                    mode = detail::greedy_mode(cs, *tgt, x.data(), dt, mode, y);
            }
        }
        if (!observe(j, x.data(), mode, stopped) || j == steps) return;
        if (stopped) continue;
        for (auto& v : z) v = normal(rng);
        for (std::size_t i = 0; i < cs.n; ++i) {
            double v = x[i] + cs.drift[mode][i](x.data()) * dt;
            for (std::size_t k = 0; k < cs.r; ++k) v += cs.diffusion[mode][i * cs.r + k](x.data()) * sq * z[k];
            y[i] = v;
        }
        if (policy.kind == PolicyKind::MarkovJump) {
            const double u = unif(rng);
            double acc = 0.0;
            for (std::size_t k = 0; k < M; ++k) {
                if (k == mode) continue;
                acc += (*cs.rates)[mode][k](x.data()) * dt;
                if (u < acc) {
                    mode = k;
                    break;
                }
            }
        }
        x.swap(y);
        if (!cs.box.contains(x)) {
            cs.box.clamp(x);
            stopped = true;
        }
    }
}

struct Trajectory {
    double dt = 0.0;
    std::size_t n = 0;
    std::vector<double> states;  // (steps + 1) x n, row-major
    std::vector<std::size_t> modes;
    bool stopped = false;
    std::size_t stop_index = 0;  // first frozen grid index when stopped

    std::size_t size() const { return modes.size(); }
    std::span<const double> state(std::size_t j) const { return {states.data() + j * n, n}; }
};

inline Trajectory simulate(const SwitchedSystem& sys, const SwitchingPolicy& policy, std::span<const double> x0,
                           double dt, std::uint64_t seed, const SimulationConfig& cfg = {}, Steering* steering = nullptr) {
    const CompiledSystem cs(sys);
    check_policy(cs, policy, dt);
    const std::size_t steps = step_count(cfg.horizon > 0.0 ? cfg.horizon : sys.horizon, dt);
    Trajectory tr;
    tr.dt = dt;
    tr.n = cs.n;
    simulate_path(cs, policy, x0, dt, steps, seed, steering, [&](std::size_t j, const double* x, std::size_t m, bool st) {
        tr.states.insert(tr.states.end(), x, x + cs.n);
        tr.modes.push_back(m);
        if (st && !tr.stopped) {
            tr.stopped = true;
            tr.stop_index = j;
        }
        return true;
    });
    return tr;
}

struct TraceWord {
    std::vector<std::string> letters;
    std::vector<double> times;  // entry time of each letter

    FiniteWord word() const { return FiniteWord(letters); }
};

inline TraceWord trace_of(const Trajectory& tr, const SwitchedSystem& sys) {
    TraceWord w;
    for (std::size_t j = 0; j < tr.size(); ++j) {
        const std::string& p = label(sys, tr.state(j));
        if (w.letters.empty() || w.letters.back() != p) {
            w.letters.push_back(p);
            w.times.push_back(static_cast<double>(j) * tr.dt);
        }
    }
    return w;
}

inline bool satisfies(const TraceWord& w, const Formula& f) { return evaluate_word(f, w.word()); }

struct Estimate {
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t excluded = 0;  // chattering traces left out of n
    double phat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;

    double sigma() const { return n ? std::sqrt(phat * (1.0 - phat) / static_cast<double>(n)) : 0.0; }
};

// Exact two-sided binomial interval.
inline std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence = 0.95) {
    if (n == 0) return {0.0, 1.0};
    const double a = 1.0 - confidence;
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);
    const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kk, nn - kk + 1.0, a / 2);
    const double hi = k == n ? 1.0 : boost::math::ibeta_inv(kk + 1.0, nn - kk, 1.0 - a / 2);
    return {lo, hi};
}

inline Estimate make_estimate(std::size_t k, std::size_t n, std::size_t excluded = 0) {
    Estimate e;
    e.k = k;
    e.n = n;
    e.excluded = excluded;
    e.phat = n ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
    std::tie(e.ci_lo, e.ci_hi) = clopper_pearson(k, n);
    e.ci_lo = std::min(e.ci_lo, e.phat);
    e.ci_hi = std::max(e.ci_hi, e.phat);
    return e;
}

// Steers toward letters that bring the automaton for the violation closer to
// acceptance, tracking the automaton state along the path.
class AutomatonSteering : public Steering {
public:
    struct Shared {
        Dfa dfa;
        std::vector<std::size_t> letter_of_label;  // label index -> DFA letter
        std::vector<std::optional<CompiledPredicate>> targets;  // per DFA state
    };

    static std::shared_ptr<const Shared> prepare(const SwitchedSystem& sys, const CompiledSystem& cs, const Formula& f) {
        auto sh = std::make_shared<Shared>(Shared{translate(negate_to_pnf(f), cs.props), {}, {}});
        const Dfa& d = sh->dfa;
        for (const auto& p : cs.props) sh->letter_of_label.push_back(static_cast<std::size_t>(d.letter_index(p)));
        // BFS distance to acceptance
        const std::size_t Q = d.num_states();
        std::vector<std::size_t> dist(Q, std::numeric_limits<std::size_t>::max());
        std::vector<int> frontier;
        for (std::size_t q = 0; q < Q; ++q)
            if (d.is_accepting(static_cast<int>(q))) {
                dist[q] = 0;
                frontier.push_back(static_cast<int>(q));
            }
        while (!frontier.empty()) {
            std::vector<int> nxt;
            for (std::size_t q = 0; q < Q; ++q) {
                if (dist[q] != std::numeric_limits<std::size_t>::max()) continue;
                for (int t : frontier)
                    if (!d.labels(static_cast<int>(q), t).empty()) {
                        dist[q] = dist[t] + 1;
                        nxt.push_back(static_cast<int>(q));
                        break;
                    }
            }
            frontier = std::move(nxt);
        }
        for (std::size_t q = 0; q < Q; ++q) {
            std::vector<std::string> good;
            for (std::size_t a = 0; a < d.num_letters(); ++a) {
                const int t = d.next(static_cast<int>(q), static_cast<int>(a));
                if (dist[q] != std::numeric_limits<std::size_t>::max() && dist[t] < dist[q]) good.push_back(d.alphabet()[a]);
            }
            if (good.empty()) {
                sh->targets.emplace_back();
            } else {
                sh->targets.emplace_back(CompiledPredicate(region_of(sys, good)));
            }
        }
        return sh;
    }

    explicit AutomatonSteering(std::shared_ptr<const Shared> sh) : sh_(std::move(sh)) {}

    const CompiledPredicate* target(std::size_t label) override {
        if (label != last_) {
            const int a = static_cast<int>(sh_->letter_of_label[label]);
            state_ = state_ < 0 ? sh_->dfa.next(sh_->dfa.initial().front(), a) : sh_->dfa.next(state_, a);
            last_ = label;
        }
        const auto& t = sh_->targets[static_cast<std::size_t>(state_)];
        return t ? &*t : nullptr;
    }

private:
    std::shared_ptr<const Shared> sh_;
    int state_ = -1;
    std::size_t last_ = std::numeric_limits<std::size_t>::max();
};

struct EstimateConfig {
    double dt = 1e-2;
    double horizon = 0.0;  // 0: the system's horizon
    std::size_t trajectories = 1000;
    std::uint64_t seed = 1;
    std::size_t max_word = 1024;
    unsigned threads = 0;  // 0: thread_count()
};

// P{trace satisfies f}. Trajectory i starts at starts[i mod |starts|].
inline Estimate estimate_satisfaction(const SwitchedSystem& sys, const Formula& f, const SwitchingPolicy& policy,
                                      const std::vector<std::vector<double>>& starts, const EstimateConfig& cfg) {
    if (!cfg.trajectories) throw InputError("need at least one trajectory");
    if (starts.empty()) throw InputError("need at least one initial state");
    const CompiledSystem cs(sys);
    check_policy(cs, policy, cfg.dt);
    const std::size_t steps = step_count(cfg.horizon > 0.0 ? cfg.horizon : sys.horizon, cfg.dt);
    std::shared_ptr<const AutomatonSteering::Shared> steer;
    if (policy.kind == PolicyKind::Adversarial) steer = AutomatonSteering::prepare(sys, cs, f);

    // 0 violated, 1 satisfied, 2 chattering
    std::vector<unsigned char> outcome(cfg.trajectories);
    parallel_for(
        cfg.trajectories,
        [&](std::size_t i) {
            std::vector<std::size_t> word;
            std::optional<AutomatonSteering> st;
            if (steer) st.emplace(steer);
            bool chatter = false;
            simulate_path(cs, policy, starts[i % starts.size()], cfg.dt, steps, substream_seed(cfg.seed, i),
                          st ? &*st : nullptr, [&](std::size_t, const double* x, std::size_t, bool stopped) {
                              const std::size_t l = cs.label_index(x);
                              if (word.empty() || word.back() != l) word.push_back(l);
                              if (word.size() > cfg.max_word) {
                                  chatter = true;
                                  return false;
                              }
                              return !stopped;
                          });
            if (chatter) {
                outcome[i] = 2;
                return;
            }
            std::vector<std::string> letters;
            for (auto l : word) letters.push_back(cs.props[l]);
            outcome[i] = evaluate_word(f, FiniteWord(letters)) ? 1 : 0;
        },
        cfg.threads ? cfg.threads : thread_count());
    std::size_t k = 0, excluded = 0;
    for (auto o : outcome) {
        if (o == 1) ++k;
        if (o == 2) ++excluded;
    }
    return make_estimate(k, cfg.trajectories - excluded, excluded);
}

inline Estimate estimate_satisfaction(const SwitchedSystem& sys, const Formula& f, const SwitchingPolicy& policy,
                                      std::span<const double> x0, const EstimateConfig& cfg) {
    return estimate_satisfaction(sys, f, policy, std::vector<std::vector<double>>{{x0.begin(), x0.end()}}, cfg);
}

// P{the stopped process meets target within the horizon}.
inline Estimate estimate_reach(const SwitchedSystem& sys, const Predicate& target, const SwitchingPolicy& policy,
                               const std::vector<std::vector<double>>& starts, const EstimateConfig& cfg) {
    if (!cfg.trajectories) throw InputError("need at least one trajectory");
    if (starts.empty()) throw InputError("need at least one initial state");
    const CompiledSystem cs(sys);
    check_policy(cs, policy, cfg.dt);
    const std::size_t steps = step_count(cfg.horizon > 0.0 ? cfg.horizon : sys.horizon, cfg.dt);
    const CompiledPredicate tgt(target);
    std::vector<unsigned char> hit(cfg.trajectories);
    parallel_for(
        cfg.trajectories,
        [&](std::size_t i) {
            FixedTarget steer(tgt);
            simulate_path(cs, policy, starts[i % starts.size()], cfg.dt, steps, substream_seed(cfg.seed, i), &steer,
                          [&](std::size_t, const double* x, std::size_t, bool stopped) {
                              if (tgt.contains(x)) {
                                  hit[i] = 1;
                                  return false;
                              }
                              return !stopped;
                          });
        },
        cfg.threads ? cfg.threads : thread_count());
    std::size_t k = 0;
    for (auto h : hit) k += h;
    return make_estimate(k, cfg.trajectories);
}

// Finite-difference estimate of the generator, (E B(X_h) - B(x)) / h after one
// Euler-Maruyama step of size h in a fixed mode. Returns mean and standard error.
inline std::pair<double, double> dynkin_estimate(const Polynomial& b, const Mode& mode, std::span<const double> x, double h,
                                                 std::size_t n, std::uint64_t seed) {
    const std::size_t dim = x.size();
    const std::size_t r = mode.diffusion.empty() ? 0 : mode.diffusion[0].size();
    if (mode.drift.size() != dim) throw DimensionMismatch("mode and point dimensions differ");
    const CompiledPolynomial B(b);
    std::vector<CompiledPolynomial> f, g;
    for (const auto& p : mode.drift) f.emplace_back(p);
    for (const auto& row : mode.diffusion)
        for (const auto& p : row) g.emplace_back(p);
    std::vector<double> fx(dim), gx(dim * r), y(dim), z(r);
    for (std::size_t i = 0; i < dim; ++i) {
        fx[i] = f[i](x.data());
        for (std::size_t k = 0; k < r; ++k) gx[i * r + k] = g[i * r + k](x.data());
    }
    const double b0 = B(x.data()), sq = std::sqrt(h);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        for (auto& v : z) v = normal(rng);
        for (std::size_t i = 0; i < dim; ++i) {
            double v = x[i] + fx[i] * h;
            for (std::size_t k = 0; k < r; ++k) v += gx[i * r + k] * sq * z[k];
            y[i] = v;
        }
        const double d = (B(y.data()) - b0) / h;
        sum += d;
        sum2 += d * d;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, sum2 / nn - mean * mean) * nn / std::max(1.0, nn - 1.0);
    return {mean, std::sqrt(var / nn)};
}

struct CheckConfig {
    EstimateConfig estimate;
    std::size_t start_points = 8;
    double slack = 0.01;
};

struct CheckRow {
    std::string prop;
    std::string policy;
    Estimate estimate;
    double bound = 0.0;
    bool pass = true;
};

// Initial states in L^{-1}(p): the region's center-most samples plus Halton points.
inline std::vector<std::vector<double>> start_points(const SwitchedSystem& sys, const std::string& p, std::size_t count) {
    return sample_predicate(region_of(sys, {p}), sys.state_space, count);
}

// Compares lower satisfaction bounds against Monte Carlo estimates for every
// proposition and policy.
inline std::vector<CheckRow> check_bound(const std::map<std::string, double>& lower, const SwitchedSystem& sys,
                                         const Formula& f, const std::vector<SwitchingPolicy>& policies,
                                         const CheckConfig& cfg) {
    std::vector<CheckRow> out;
    std::uint64_t stream = 0;
    for (const auto& [p, lb] : lower) {
        const auto starts = start_points(sys, p, cfg.start_points);
        ++stream;
        if (starts.empty()) continue;
        for (const auto& pol : policies) {
            EstimateConfig ec = cfg.estimate;
            ec.seed = substream_seed(cfg.estimate.seed, stream * 1000 + static_cast<std::uint64_t>(&pol - policies.data()));
            CheckRow row;
            row.prop = p;
            row.policy = pol.name(sys);
            row.estimate = estimate_satisfaction(sys, f, pol, starts, ec);
            row.bound = lb;
            row.pass = lb <= row.estimate.ci_lo + cfg.slack;
            out.push_back(std::move(row));
        }
    }
    return out;
}

inline std::string format_check_csv(const std::vector<CheckRow>& rows) {
    std::ostringstream out;
    out << "prop,policy,n,k,phat,ci_lo,ci_hi,bound,pass\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%s\n", r.prop.c_str(), r.policy.c_str(),
                      r.estimate.n, r.estimate.k, r.estimate.phat, r.estimate.ci_lo, r.estimate.ci_hi, r.bound,
                      r.pass ? "true" : "false");
        out << buf;
    }
    return out.str();
}

inline std::string format_trajectory_csv(const Trajectory& tr, const SwitchedSystem& sys) {
    std::ostringstream out;
    out << 't';
    for (std::size_t i = 1; i <= tr.n; ++i) out << ",x" << i;
    out << ",mode,prop\n";
    char buf[64];
    for (std::size_t j = 0; j < tr.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.10g", static_cast<double>(j) * tr.dt);
        out << buf;
        for (double v : tr.state(j)) {
            std::snprintf(buf, sizeof buf, ",%.10g", v);
            out << buf;
        }
        out << ',' << sys.modes.at(tr.modes[j]).id << ',' << label(sys, tr.state(j)) << '\n';
    }
    return out.str();
}

}  // namespace stoverify
