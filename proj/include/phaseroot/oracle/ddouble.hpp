#pragma once

// Double-double arithmetic: a value is the unevaluated sum hi + lo.

#include <cmath>
#include <ostream>

namespace phaseroot::oracle {

struct ExtReal {
    double hi = 0.0;
    double lo = 0.0;

    constexpr ExtReal() = default;
    constexpr ExtReal(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
    constexpr ExtReal(double h, double l) : hi(h), lo(l) {}

    [[nodiscard]] explicit operator double() const noexcept { return hi + lo; }
    [[nodiscard]] double to_double() const noexcept { return hi + lo; }
};

/// s + e == a + b exactly.
inline ExtReal two_sum(double a, double b) noexcept {
    const double s = a + b;
    const double bb = s - a;
    const double e = (a - (s - bb)) + (b - bb);
    return {s, e};
}

inline ExtReal quick_two_sum(double a, double b) noexcept {
    const double s = a + b;
    return {s, b - (s - a)};
}

/// p + e == a * b exactly.
inline ExtReal two_prod(double a, double b) noexcept {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline ExtReal operator+(const ExtReal& a, const ExtReal& b) noexcept {
    ExtReal s = two_sum(a.hi, b.hi);
    ExtReal t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline ExtReal operator-(const ExtReal& a) noexcept { return {-a.hi, -a.lo}; }
inline ExtReal operator-(const ExtReal& a, const ExtReal& b) noexcept { return a + (-b); }

inline ExtReal operator*(const ExtReal& a, const ExtReal& b) noexcept {
    ExtReal p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline ExtReal operator/(const ExtReal& a, const ExtReal& b) noexcept {
    const double q1 = a.hi / b.hi;
    ExtReal r = a - b * ExtReal(q1);
    const double q2 = r.hi / b.hi;
    r = r - b * ExtReal(q2);
    const double q3 = r.hi / b.hi;
    ExtReal q = quick_two_sum(q1, q2);
    return q + ExtReal(q3);
}

inline ExtReal& operator+=(ExtReal& a, const ExtReal& b) noexcept { return a = a + b; }
inline ExtReal& operator-=(ExtReal& a, const ExtReal& b) noexcept { return a = a - b; }
inline ExtReal& operator*=(ExtReal& a, const ExtReal& b) noexcept { return a = a * b; }
inline ExtReal& operator/=(ExtReal& a, const ExtReal& b) noexcept { return a = a / b; }

inline bool operator<(const ExtReal& a, const ExtReal& b) noexcept { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(const ExtReal& a, const ExtReal& b) noexcept { return b < a; }
inline bool operator<=(const ExtReal& a, const ExtReal& b) noexcept { return !(b < a); }
inline bool operator>=(const ExtReal& a, const ExtReal& b) noexcept { return !(a < b); }
inline bool operator==(const ExtReal& a, const ExtReal& b) noexcept { return a.hi == b.hi && a.lo == b.lo; }

inline ExtReal abs(const ExtReal& a) noexcept { return a.hi < 0 ? -a : a; }

inline ExtReal sqrt(const ExtReal& a) {
    if (a.hi <= 0) return {std::sqrt(a.hi), 0.0};
    const double x = std::sqrt(a.hi);
    // one Newton step in extended precision
    const ExtReal r = a - two_prod(x, x);
    return quick_two_sum(x, r.hi / (2.0 * x));
}

inline std::ostream& operator<<(std::ostream& os, const ExtReal& a) { return os << a.hi << " + " << a.lo; }

}  // namespace phaseroot::oracle
