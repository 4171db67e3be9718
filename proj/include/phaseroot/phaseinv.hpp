#pragma once

// Inverse of a (strictly increasing) phase function, stored piecewise on the
// images of the forward breakpoints.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "phaseroot/chebkit.hpp"
#include "phaseroot/error.hpp"
#include "phaseroot/kummer.hpp"

namespace phaseroot {

inline constexpr std::string_view kInverseModule = "phaseinv";

struct InversePhase {
    PiecewiseCheb inverse;  // t as a function of the image variable x = alpha(t)

    [[nodiscard]] Interval domain() const { return inverse.domain(); }
    [[nodiscard]] const std::vector<double>& breakpoints() const { return inverse.breakpoints(); }
};

namespace detail {

/// Solves alpha(t) = rho for t in [tl, tr] given alpha(tl) <= rho <= alpha(tr).
inline double solve_phase(const PhaseFunction& phase, double rho, double guess, double tl, double tr, double tol) {
    const double target_tol = tol * std::max(1.0, std::abs(rho));
    auto alpha_at = [&](double t) { return phase.alpha(t); };
    double t = std::clamp(guess, tl, tr);
    for (int it = 0; it < 20; ++it) {
        const std::size_t i = phase.alpha.locate(t);
        const double f = phase.alpha.eval_piece(i, t) - rho;
        if (std::abs(f) <= target_tol) return t;
        if (f < 0) tl = std::max(tl, t); else tr = std::min(tr, t);
        const double d = phase.alpha1.eval_piece(i, t);
        const double next = t - f / d;
        if (!(next >= tl && next <= tr) || !(d > 0)) break;
        if (std::abs(next - t) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) return next;
        t = next;
    }
    // bisection fallback on the current bracket
    double fl = alpha_at(tl) - rho, fr = alpha_at(tr) - rho;
    if (fl > target_tol || fr < -target_tol) {
        throw Error(kInverseModule, ErrorKind::inversion_failure,
                    "target " + std::to_string(rho) + " not bracketed; phase is not monotone");
    }
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (tl + tr);
        if (!(mid > tl && mid < tr)) break;
        const double fm = alpha_at(mid) - rho;
        if (std::abs(fm) <= target_tol) return mid;
        if (fm < 0) tl = mid; else tr = mid;
    }
    fl = alpha_at(tl) - rho;
    fr = alpha_at(tr) - rho;
    return std::abs(fl) <= std::abs(fr) ? tl : tr;
}

}  // namespace detail

[[nodiscard]] inline InversePhase invert_phase(const PhaseFunction& phase, const SolverOptions& opts) {
    for (double v : phase.alpha1.all_values()) {
        if (!(v > 0)) throw Error(kInverseModule, ErrorKind::inversion_failure, "alpha' is not positive at a node");
    }
    const auto& fb = phase.alpha.breakpoints();
    const std::size_t m = phase.alpha.pieces();
    // images of the forward breakpoints; values at piece ends are exact grid values
    std::vector<double> img(m + 1);
    img[0] = phase.alpha.values(0).back();
    for (std::size_t i = 0; i < m; ++i) img[i + 1] = phase.alpha.values(i).front();

    // keep breakpoints whose images strictly increase by a meaningful amount
    std::vector<std::size_t> keep{0};
    for (std::size_t i = 1; i <= m; ++i) {
        const double prev = img[keep.back()];
        const double gap = img[i] - prev;
        if (gap < 0) {
            throw Error(kInverseModule, ErrorKind::inversion_failure, "phase decreases across a breakpoint");
        }
        if (gap > 1e-14 * std::max(1.0, std::abs(img[i]))) {
            keep.push_back(i);
        } else if (i == m) {
            keep.back() = m;  // merge the final sliver into its left neighbour
        }
    }
    if (keep.size() < 2) throw Error(kInverseModule, ErrorKind::inversion_failure, "phase image is degenerate");

    const int k = phase.alpha.order();
    std::vector<double> ib, values;
    ib.reserve(keep.size());
    values.reserve((keep.size() - 1) * static_cast<std::size_t>(k));
    for (std::size_t p : keep) ib.push_back(img[p]);
    for (std::size_t s = 0; s + 1 < keep.size(); ++s) {
        const double tl = fb[keep[s]], tr = fb[keep[s + 1]];
        const auto rho = cheb_nodes(k, {ib[s], ib[s + 1]});
        std::vector<double> t(k);
        t[0] = tr;
        t[k - 1] = tl;
        double guess = tr;
        for (int j = 1; j + 1 < k; ++j) {
            t[j] = detail::solve_phase(phase, rho[j], guess, tl, t[j - 1], opts.newton_inv_tol);
            guess = t[j];
        }
        for (int j = 1; j < k; ++j) {
            if (t[j] > t[j - 1]) {
                throw Error(kInverseModule, ErrorKind::inversion_failure, "inverse values not monotone");
            }
        }
        values.insert(values.end(), t.begin(), t.end());
    }
    return InversePhase{PiecewiseCheb(std::move(ib), k, std::move(values))};
}

[[nodiscard]] inline double inv_eval(const InversePhase& inv, double x) {
    const auto& br = inv.inverse.breakpoints();
    if (!(x >= br.front() && x <= br.back())) {
        throw Error(kInverseModule, ErrorKind::out_of_domain, "inverse evaluated outside the phase image");
    }
    return inv.inverse(x);
}

}  // namespace phaseroot
