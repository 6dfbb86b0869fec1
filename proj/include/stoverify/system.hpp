#pragma once

// Switched stochastic systems: modes, labeled semi-algebraic regions, the
// compact state space and the optional transition-rate matrix.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stoverify/error.hpp"
#include "stoverify/ltl.hpp"
#include "stoverify/polynomial.hpp"

namespace stoverify {

struct Box {
    std::vector<double> lower, upper;

    std::size_t dimension() const { return lower.size(); }
    bool contains(std::span<const double> x, double tol = 0.0) const {
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        return true;
    }
    std::vector<Interval> intervals() const {
        std::vector<Interval> out;
        for (std::size_t i = 0; i < lower.size(); ++i) out.emplace_back(lower[i], upper[i]);
        return out;
    }
    std::vector<double> center() const {
        std::vector<double> c(lower.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
        return c;
    }
    void clamp(std::span<double> x) const {
        for (std::size_t i = 0; i < lower.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    }
};

// Conjunction of constraints h(x) <= 0.
using Cell = std::vector<Polynomial>;

// Finite union of cells. An empty cell list is the empty set; a cell with
// no constraints is the whole state space.
struct Predicate {
    std::vector<Cell> cells;

    bool contains(std::span<const double> x, double tol = 0.0) const {
        for (const auto& cell : cells) {
            bool in = true;
            for (const auto& h : cell)
                if (!(h.evaluate(x) <= tol)) {
                    in = false;
                    break;
                }
            if (in) return true;
        }
        return false;
    }
    bool empty() const { return cells.empty(); }
};

inline std::string to_string(const Predicate& p) {
    if (p.cells.empty()) return "false";
    std::string s;
    for (std::size_t c = 0; c < p.cells.size(); ++c) {
        if (c) s += " | ";
        if (p.cells[c].empty()) {
            s += "true";
            continue;
        }
        s += "(";
        for (std::size_t j = 0; j < p.cells[c].size(); ++j) s += (j ? " & " : "") + to_string(p.cells[c][j]) + " <= 0";
        s += ")";
    }
    return s;
}

struct Mode {
    std::string id;
    std::vector<Polynomial> drift;                   // n entries
    std::vector<std::vector<Polynomial>> diffusion;  // n x r
};

struct Region {
    std::string prop;
    std::vector<Polynomial> inequalities;  // each <= 0
    bool is_complement = false;
};

struct SwitchedSystem {
    std::size_t dimension = 0;
    std::size_t noise_dimension = 0;
    Box state_space;
    std::vector<Mode> modes;
    std::vector<Region> regions;  // declared regions, then the complement region last
    std::string complement_prop;
    double horizon = 0.0;
    std::optional<std::vector<std::vector<Polynomial>>> rates;
    std::string formula;  // empty when the file has none

    std::vector<std::string> propositions() const {
        std::vector<std::string> out;
        for (const auto& r : regions) out.push_back(r.prop);
        return out;
    }
    int mode_index(const std::string& id) const {
        for (std::size_t m = 0; m < modes.size(); ++m)
            if (modes[m].id == id) return static_cast<int>(m);
        throw MissingMode("no mode with id '" + id + "'");
    }
    const Region& region(const std::string& prop) const {
        for (const auto& r : regions)
            if (r.prop == prop) return r;
        throw UnknownProposition("unknown proposition '" + prop + "'");
    }
};

struct LoadOptions {
    // Grid points per axis for the overlap and rate checks; the total is capped.
    std::size_t grid_per_axis = 101;
    std::size_t max_grid_points = 200000;
    // Samples per edge of the enlarged box used for the boundedness check.
    std::size_t boundary_samples = 64;
};

// Uniform grid over a box including the endpoints, at most max_points points.
inline std::vector<std::vector<double>> box_grid(const Box& b, std::size_t per_axis, std::size_t max_points) {
    const std::size_t n = b.dimension();
    if (n == 0) return {{}};
    while (per_axis > 2 && std::pow(static_cast<double>(per_axis), static_cast<double>(n)) > static_cast<double>(max_points))
        --per_axis;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per_axis;
    std::vector<std::vector<double>> out;
    out.reserve(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = per_axis == 1 ? b.lower[i]
                                 : b.lower[i] + (b.upper[i] - b.lower[i]) * static_cast<double>(idx[i]) /
                                                    static_cast<double>(per_axis - 1);
        out.push_back(std::move(x));
        for (std::size_t i = 0; i < n && ++idx[i] == per_axis; ++i) idx[i] = 0;
    }
    return out;
}

inline bool region_contains(const Region& r, std::span<const double> x, bool strict = false) {
    for (const auto& h : r.inequalities) {
        const double v = h.evaluate(x);
        if (strict ? !(v < 0.0) : !(v <= 0.0)) return false;
    }
    return true;
}

// Proposition of the first declared region containing x, else the complement.
inline const std::string& label(const SwitchedSystem& sys, std::span<const double> x) {
    if (x.size() != sys.dimension) throw DimensionMismatch("state has the wrong dimension");
    if (!sys.state_space.contains(x, 1e-12)) throw OutOfStateSpace("state lies outside the state space");
    for (const auto& r : sys.regions)
        if (!r.is_complement && region_contains(r, x)) return r.prop;
    return sys.complement_prop;
}

namespace detail {

// Closure of the complement of the declared regions, as a union of cells.
inline std::vector<Cell> complement_cells(const SwitchedSystem& sys) {
    std::vector<Cell> acc{Cell{}};
    for (const auto& r : sys.regions) {
        if (r.is_complement || r.inequalities.empty()) continue;
        std::vector<Cell> next;
        for (const auto& cell : acc)
            for (const auto& h : r.inequalities) {
                Cell c = cell;
                c.push_back(-h);
                next.push_back(std::move(c));
            }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace detail

// L^{-1}(props) as a predicate (implicitly intersected with the state space).
template <class Range>
Predicate region_of(const SwitchedSystem& sys, const Range& props) {
    Predicate out;
    bool any = false;
    for (const std::string& p : props) {
        any = true;
        const Region& r = sys.region(p);
        if (r.is_complement) {
            for (auto& c : detail::complement_cells(sys)) out.cells.push_back(std::move(c));
        } else {
            out.cells.push_back(r.inequalities);
        }
    }
    if (!any) throw InputError("region_of needs at least one proposition");
    return out;
}

inline Predicate region_of(const SwitchedSystem& sys, std::initializer_list<std::string> props) {
    return region_of(sys, std::vector<std::string>(props));
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline Polynomial poly_field(const nlohmann::json& j, std::size_t n, const std::string& where) {
    try {
        if (j.is_string()) return parse_polynomial(j.get<std::string>(), n);
        if (j.is_number_integer()) return Polynomial(Rational(j.get<long long>()));
        if (j.is_number()) return parse_polynomial(j.dump(), n);
    } catch (const SyntaxError& e) {
        throw SchemaError(where + ": " + e.what());
    }
    throw SchemaError(where + ": expected a polynomial string");
}

inline double number_field(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError(where + ": expected a number");
    return j.get<double>();
}

inline void check_bounded(const SwitchedSystem& sys, const Region& r, std::size_t samples) {
    // A bounded region inside the box cannot reach the boundary of the box
    // enlarged twofold about its center.
    Box big = sys.state_space;
    const auto c = big.center();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double h = big.upper[i] - big.lower[i];
        big.lower[i] = c[i] - h;
        big.upper[i] = c[i] + h;
    }
    const std::size_t n = sys.dimension;
    const std::size_t per_axis = std::max<std::size_t>(2, samples);
    for (std::size_t face = 0; face < n; ++face) {
        Box fb = big;
        fb.lower.erase(fb.lower.begin() + face);
        fb.upper.erase(fb.upper.begin() + face);
        for (const auto& y : box_grid(fb, per_axis, 1 << 16))
            for (double side : {big.lower[face], big.upper[face]}) {
                std::vector<double> x(y);
                x.insert(x.begin() + face, side);
                if (region_contains(r, x))
                    throw UnboundedRegion("region for '" + r.prop + "' is not bounded");
            }
    }
}

inline void check_rates(const SwitchedSystem& sys, const LoadOptions& opts) {
    const auto& lam = *sys.rates;
    const std::size_t k = sys.modes.size();
    if (lam.size() != k) throw BadRateMatrix("rate matrix must be " + std::to_string(k) + "x" + std::to_string(k));
    for (const auto& row : lam)
        if (row.size() != k) throw BadRateMatrix("rate matrix must be square over the modes");
    for (std::size_t m = 0; m < k; ++m) {
        Polynomial s;
        for (const auto& e : lam[m]) s += e;
        if (!s.is_zero()) throw BadRateMatrix("row " + std::to_string(m + 1) + " of the rate matrix does not sum to zero");
    }
    for (const auto& x : box_grid(sys.state_space, opts.grid_per_axis, opts.max_grid_points))
        for (std::size_t m = 0; m < k; ++m)
            for (std::size_t q = 0; q < k; ++q)
                if (m != q && lam[m][q].evaluate(x) < -1e-12)
                    throw BadRateMatrix("rate from mode " + sys.modes[m].id + " to " + sys.modes[q].id +
                                        " is negative somewhere on the state space");
}

inline void check_overlaps(const SwitchedSystem& sys, const LoadOptions& opts) {
    const auto grid = box_grid(sys.state_space, opts.grid_per_axis, opts.max_grid_points);
    for (const auto& x : grid) {
        const Region* hit = nullptr;
        for (const auto& r : sys.regions) {
            if (r.is_complement || !region_contains(r, x, true)) continue;
            if (hit) throw OverlappingRegions("regions for '" + hit->prop + "' and '" + r.prop + "' overlap");
            hit = &r;
        }
    }
}

}  // namespace detail

inline SwitchedSystem system_from_json(const nlohmann::json& j, const LoadOptions& opts = {}) {
    using detail::field;
    SwitchedSystem sys;
    const auto& dim = field(j, "dimension", "system");
    const auto& noise = field(j, "noise_dimension", "system");
    if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) throw SchemaError("dimension must be a positive integer");
    if (!noise.is_number_unsigned()) throw SchemaError("noise_dimension must be a non-negative integer");
    sys.dimension = dim.get<std::size_t>();
    sys.noise_dimension = noise.get<std::size_t>();
    const std::size_t n = sys.dimension, r = sys.noise_dimension;

    const auto& ss = field(j, "state_space", "system");
    const auto& lo = field(ss, "lower", "state_space");
    const auto& hi = field(ss, "upper", "state_space");
    if (!lo.is_array() || !hi.is_array()) throw SchemaError("state_space bounds must be arrays");
    if (lo.size() != n || hi.size() != n) throw DimensionMismatch("state_space bounds must have one entry per dimension");
    for (std::size_t i = 0; i < n; ++i) {
        sys.state_space.lower.push_back(detail::number_field(lo[i], "state_space.lower"));
        sys.state_space.upper.push_back(detail::number_field(hi[i], "state_space.upper"));
        if (!std::isfinite(sys.state_space.lower[i]) || !std::isfinite(sys.state_space.upper[i]) ||
            !(sys.state_space.lower[i] < sys.state_space.upper[i]))
            throw UnboundedRegion("state_space must be a finite box with lower < upper");
    }

    const auto& modes = field(j, "modes", "system");
    if (!modes.is_array() || modes.empty()) throw SchemaError("modes must be a nonempty array");
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const std::string where = "modes[" + std::to_string(m) + "]";
        Mode mode;
        const auto& id = field(modes[m], "id", where);
        mode.id = id.is_string() ? id.get<std::string>() : id.dump();
        const auto& f = field(modes[m], "drift", where);
        const auto& g = field(modes[m], "diffusion", where);
        if (!f.is_array() || f.size() != n) throw DimensionMismatch(where + ".drift must have " + std::to_string(n) + " entries");
        for (const auto& e : f) mode.drift.push_back(detail::poly_field(e, n, where + ".drift"));
        if (!g.is_array() || g.size() != n) throw DimensionMismatch(where + ".diffusion must have " + std::to_string(n) + " rows");
        for (const auto& row : g) {
            if (!row.is_array() || row.size() != r)
                throw DimensionMismatch(where + ".diffusion rows must have " + std::to_string(r) + " entries");
            std::vector<Polynomial> pr;
            for (const auto& e : row) pr.push_back(detail::poly_field(e, n, where + ".diffusion"));
            mode.diffusion.push_back(std::move(pr));
        }
        for (const auto& other : sys.modes)
            if (other.id == mode.id) throw SchemaError("duplicate mode id '" + mode.id + "'");
        sys.modes.push_back(std::move(mode));
    }

    const auto& regions = field(j, "regions", "system");
    if (!regions.is_array()) throw SchemaError("regions must be an array");
    std::set<std::string> seen;
    for (std::size_t k = 0; k < regions.size(); ++k) {
        const std::string where = "regions[" + std::to_string(k) + "]";
        Region reg;
        const auto& p = field(regions[k], "prop", where);
        if (!p.is_string() || p.get<std::string>().empty()) throw SchemaError(where + ".prop must be a nonempty string");
        reg.prop = p.get<std::string>();
        const auto& ineq = field(regions[k], "inequalities", where);
        if (!ineq.is_array() || ineq.empty()) throw SchemaError(where + ".inequalities must be a nonempty array");
        for (const auto& e : ineq) reg.inequalities.push_back(detail::poly_field(e, n, where + ".inequalities"));
        if (!seen.insert(reg.prop).second) throw SchemaError("duplicate proposition '" + reg.prop + "'");
        sys.regions.push_back(std::move(reg));
    }
    const auto& cp = field(j, "complement_prop", "system");
    if (!cp.is_string() || cp.get<std::string>().empty()) throw SchemaError("complement_prop must be a nonempty string");
    sys.complement_prop = cp.get<std::string>();
    if (!seen.insert(sys.complement_prop).second) throw SchemaError("complement_prop duplicates a region proposition");
    sys.regions.push_back(Region{sys.complement_prop, {}, true});

    sys.horizon = detail::number_field(field(j, "horizon", "system"), "horizon");
    if (!(sys.horizon > 0.0) || !std::isfinite(sys.horizon)) throw SchemaError("horizon must be positive");

    if (j.contains("rates") && !j.at("rates").is_null()) {
        const auto& rates = j.at("rates");
        if (!rates.is_array()) throw BadRateMatrix("rates must be a matrix");
        std::vector<std::vector<Polynomial>> lam;
        for (const auto& row : rates) {
            if (!row.is_array()) throw BadRateMatrix("rates must be a matrix");
            std::vector<Polynomial> pr;
            for (const auto& e : row) pr.push_back(detail::poly_field(e, n, "rates"));
            lam.push_back(std::move(pr));
        }
        sys.rates = std::move(lam);
        detail::check_rates(sys, opts);
    }

    if (j.contains("formula")) {
        const auto& f = j.at("formula");
        if (!f.is_string()) throw SchemaError("formula must be a string");
        sys.formula = f.get<std::string>();
        for (const auto& a : atoms(parse_formula(sys.formula)))
            if (!seen.count(a)) throw UnknownProposition("formula mentions unknown proposition '" + a + "'");
    }

    for (const auto& reg : sys.regions)
        if (!reg.is_complement) detail::check_bounded(sys, reg, opts.boundary_samples);
    detail::check_overlaps(sys, opts);
    return sys;
}

inline SwitchedSystem parse_system(const std::string& text, const LoadOptions& opts = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    return system_from_json(j, opts);
}

inline SwitchedSystem load_system(const std::string& path, const LoadOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open system file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str(), opts);
}

}  // namespace stoverify
