#pragma once

// Closed intervals with outward rounding after every operation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace stoverify {

struct Interval {
    double lo = 0.0, hi = 0.0;

    Interval() = default;
    Interval(double v) : lo(v), hi(v) {}  // NOLINT(google-explicit-constructor)
    Interval(double l, double h) : lo(l), hi(h) {}

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    double radius() const { return 0.5 * (hi - lo); }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    bool contains(double v) const { return lo <= v && v <= hi; }
};

namespace detail {
inline double down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
inline double up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }
inline Interval widen(double lo, double hi) { return {down(lo), up(hi)}; }
}  // namespace detail

inline Interval operator+(Interval a, Interval b) { return detail::widen(a.lo + b.lo, a.hi + b.hi); }
inline Interval operator-(Interval a, Interval b) { return detail::widen(a.lo - b.hi, a.hi - b.lo); }
inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline Interval operator*(Interval a, Interval b) {
    const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return detail::widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

inline Interval& operator+=(Interval& a, Interval b) { return a = a + b; }
inline Interval& operator*=(Interval& a, Interval b) { return a = a * b; }

// Tight power: even exponents of an interval straddling zero start at 0.
inline Interval pow(Interval a, unsigned e) {
    if (e == 0) return {1.0, 1.0};
    Interval r = a;
    for (unsigned i = 1; i < e; ++i) r = r * a;
    if (e % 2 == 0) r.lo = std::max(r.lo, 0.0);
    if (e % 2 == 0 && a.lo <= 0.0 && a.hi >= 0.0) r.lo = 0.0;
    return r;
}

inline Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

inline std::ostream& operator<<(std::ostream& os, Interval a) { return os << '[' << a.lo << ", " << a.hi << ']'; }

}  // namespace stoverify
