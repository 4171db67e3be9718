#pragma once

// Roots of a particular solution y = d1 sin(alpha(t) + d2) / sqrt(alpha'(t)).
// The k-th root solves alpha(t) = k pi - d2 and y'(t_k) = (-1)^k d1 sqrt(alpha'(t_k)).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "phaseroot/error.hpp"
#include "phaseroot/kummer.hpp"
#include "phaseroot/parallel.hpp"
#include "phaseroot/phaseinv.hpp"

namespace phaseroot {

inline constexpr std::string_view kRootModule = "rootfind";

struct Amplitude {
    double c1 = 0.0;
    double c2 = 0.0;
    double d1 = 0.0;
    double d2 = std::numbers::pi;
};

struct RootResult {
    long index = 0;
    double t = 0.0;
    double yprime = 0.0;
    double t_lo = 0.0;  // last Newton correction, below the rounding of t
};

struct RootSpan {
    long count = 0;             // number of k >= 1 with k pi - d2 in [0, alpha(b)]
    bool root_at_a = false;     // k = 1 lands exactly on a (d2 = pi)
    bool root_at_b = false;
    [[nodiscard]] long interior() const noexcept { return count - (root_at_a ? 1 : 0) - (root_at_b ? 1 : 0); }
};

namespace detail {

// pi = kPiHi + kPiLo to about 2^-106 relative
inline constexpr double kPiHi = 3.141592653589793116;
inline constexpr double kPiLo = 1.2246467991473532e-16;

/// k pi - shift with the product carried in two pieces.
inline double k_pi_minus(long k, double shift) {
    const double kd = static_cast<double>(k);
    const double hi = kd * kPiHi;
    const double err = std::fma(kd, kPiHi, -hi);
    return (hi - shift) + (err + kd * kPiLo);
}

/// k pi - shift as an unevaluated sum (hi, lo).
inline std::pair<double, double> k_pi_minus_split(long k, double shift) {
    const double kd = static_cast<double>(k);
    const double hi = kd * kPiHi;
    const double err = std::fma(kd, kPiHi, -hi);
    const double s = hi - shift;
    const double bb = s - hi;
    const double e = (hi - (s - bb)) + (-shift - bb);
    const double r = s + (e + err + kd * kPiLo);
    return {r, (s - r) + (e + err + kd * kPiLo)};
}

inline double phase_end(const PhaseFunction& phase) { return phase.alpha.all_values()[phase.alpha.node_count() - phase.alpha.order()]; }

}  // namespace detail

/// d2 in (0, pi] with c1 = d1 sin d2 and c2 = d1 cos d2.
[[nodiscard]] inline Amplitude to_polar(double c1, double c2) {
    if (c1 == 0.0 && c2 == 0.0) throw Error(kRootModule, ErrorKind::degenerate_solution, "zero amplitude");
    Amplitude a;
    a.c1 = c1;
    a.c2 = c2;
    const double r = std::hypot(c1, c2);
    if (c1 > 0) {
        a.d2 = std::atan2(c1, c2);
        a.d1 = r;
    } else if (c1 < 0) {
        a.d2 = std::atan2(c1, c2) + std::numbers::pi;
        a.d1 = -r;
    } else {
        a.d2 = std::numbers::pi;
        a.d1 = -c2;
    }
    return a;
}

/// (c1, c2) from y(a), y'(a) and the phase at a.
[[nodiscard]] inline std::pair<double, double> fit_amplitude(double y_a, double yp_a, double a1, double a2) {
    if (y_a == 0.0 && yp_a == 0.0) throw Error(kRootModule, ErrorKind::degenerate_solution, "zero initial data");
    if (!(a1 > 0)) throw Error(kRootModule, ErrorKind::degenerate_phase, "alpha' must be positive at the anchor");
    const double s = std::sqrt(a1);
    return {y_a * s, y_a * a2 / (2.0 * a1 * s) + yp_a / s};
}

[[nodiscard]] inline std::pair<double, double> fit_amplitude(double y_a, double yp_a, const PhaseFunction& phase) {
    const double a = phase.domain().lo;
    return fit_amplitude(y_a, yp_a, phase.alpha1(a), phase.alpha2(a));
}

/// Amplitude for data given at an interior point t0. The constant alpha(t0)
/// is folded into d2 (reduced back to (0, pi], flipping d1 per pi shift).
[[nodiscard]] inline Amplitude fit_amplitude_at(double t0, double y0, double yp0, const PhaseFunction& phase) {
    const auto [c1, c2] = fit_amplitude(y0, yp0, phase.alpha1(t0), phase.alpha2(t0));
    Amplitude amp = to_polar(c1, c2);
    const double shift = phase.alpha(t0);
    if (shift == 0.0) return amp;
    // y = d1 sin(alpha - shift + d2) / sqrt(alpha'); e = d2 - shift
    const double e = amp.d2 - shift;
    long m = static_cast<long>(std::ceil(e / std::numbers::pi)) - 1;
    double d2 = -detail::k_pi_minus(m, e);  // e - m pi
    while (d2 <= 0.0) {
        --m;
        d2 = -detail::k_pi_minus(m, e);
    }
    while (d2 > std::numbers::pi) {
        ++m;
        d2 = -detail::k_pi_minus(m, e);
    }
    amp.d2 = d2;
    if (m % 2 != 0) amp.d1 = -amp.d1;
    return amp;
}

[[nodiscard]] inline RootSpan root_span(const PhaseFunction& phase, const Amplitude& amp) {
    const double end = detail::phase_end(phase);
    RootSpan s;
    s.count = static_cast<long>(std::floor((end + amp.d2) / std::numbers::pi));
    // guard the floor against rounding at the boundary
    while (s.count > 0 && detail::k_pi_minus(s.count, amp.d2) > end) --s.count;
    while (detail::k_pi_minus(s.count + 1, amp.d2) <= end) ++s.count;
    s.root_at_a = s.count >= 1 && amp.d2 == std::numbers::pi;
    s.root_at_b = s.count >= 1 && detail::k_pi_minus(s.count, amp.d2) == end;
    return s;
}

[[nodiscard]] inline long count_roots(const PhaseFunction& phase, const Amplitude& amp) { return root_span(phase, amp).count; }

/// k-th root as t + lo, lo the Newton correction left after rounding t.
[[nodiscard]] inline std::pair<double, double> kth_root_split(const PhaseFunction& phase, const InversePhase& inv,
                                                              const Amplitude& amp, long k) {
    const double end = detail::phase_end(phase);
    const double x = detail::k_pi_minus(k, amp.d2);
    if (k < 1 || x > end) {
        throw Error(kRootModule, ErrorKind::out_of_domain, "root index " + std::to_string(k) + " out of range");
    }
    const Interval dom = phase.domain();
    if (k == 1 && amp.d2 == std::numbers::pi) return {dom.lo, 0.0};  // y(a) = 0
    const double xc = std::clamp(x, 0.0, end);
    double t = inv_eval(inv, xc);
    // Newton on alpha(t) - x with both sides kept as hi + lo
    const auto [xh, xl] = detail::k_pi_minus_split(k, amp.d2);
    const auto& sp = phase.alpha_split;
    double lo = 0.0;
    for (int it = 0; it < 3; ++it) {
        const std::size_t i = phase.alpha1.locate(t);
        const double f = ((sp.base_hi[i] - xh) + (sp.base_lo[i] - xl)) + sp.local.eval_piece(i, t);
        const double d = phase.alpha1.eval_piece(i, t);
        if (!(d > 0)) break;
        if (it == 2) {
            lo = -f / d;
            break;
        }
        t = std::clamp(t - f / d, dom.lo, dom.hi);
    }
    if (t + lo < dom.lo || t + lo > dom.hi) lo = 0.0;
    return {t, lo};
}

[[nodiscard]] inline double kth_root(const PhaseFunction& phase, const InversePhase& inv, const Amplitude& amp, long k) {
    const auto [t, lo] = kth_root_split(phase, inv, amp, k);
    return t + lo;
}

[[nodiscard]] inline double derivative_at_root(const PhaseFunction& phase, const Amplitude& amp, long k, double t_k) {
    const double a1 = phase.alpha1(t_k);
    if (!(a1 > 0)) throw Error(kRootModule, ErrorKind::degenerate_phase, "alpha' not positive at root");
    const double v = amp.d1 * std::sqrt(a1);
    return (k % 2 == 0) ? v : -v;
}

/// Roots first..last (inclusive) into an index-addressed buffer.
[[nodiscard]] inline std::vector<RootResult> roots_range(const PhaseFunction& phase, const InversePhase& inv,
                                                         const Amplitude& amp, long first, long last,
                                                         unsigned threads = 1) {
    if (last < first) return {};
    std::vector<RootResult> out(static_cast<std::size_t>(last - first + 1));
    parallel_for(out.size(), threads, [&](std::size_t j) {
        const long k = first + static_cast<long>(j);
        const auto [t, lo] = kth_root_split(phase, inv, amp, k);
        out[j] = RootResult{k, t, derivative_at_root(phase, amp, k, t), lo};
    });
    return out;
}

[[nodiscard]] inline std::vector<RootResult> all_roots(const PhaseFunction& phase, const InversePhase& inv,
                                                       const Amplitude& amp, unsigned threads = 1) {
    return roots_range(phase, inv, amp, 1, count_roots(phase, amp), threads);
}

}  // namespace phaseroot
