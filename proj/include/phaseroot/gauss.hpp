#pragma once

// Gauss-Legendre, Gauss-Jacobi and generalized Gauss-Laguerre rules from
// phase functions of the transformed (Liouville normal form) equations.

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phaseroot/chebkit.hpp"
#include "phaseroot/error.hpp"
#include "phaseroot/kummer.hpp"
#include "phaseroot/phaseinv.hpp"
#include "phaseroot/rootfind.hpp"

namespace phaseroot {

inline constexpr std::string_view kGaussModule = "gauss";

enum class RuleFamily { legendre, jacobi, laguerre };

[[nodiscard]] constexpr std::string_view to_string(RuleFamily f) noexcept {
    switch (f) {
    case RuleFamily::legendre: return "legendre";
    case RuleFamily::jacobi: return "jacobi";
    case RuleFamily::laguerre: return "laguerre";
    }
    return "unknown";
}

struct QuadratureRule {
    int n = 0;
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;
    RuleFamily family = RuleFamily::legendre;
    double gamma = 0.0;
    double zeta = 0.0;
    std::size_t phase_pieces = 0;  // total pieces over all phases built
};

/// Default per-family options (k = 5 for the graded Legendre mesh, 30 otherwise).
[[nodiscard]] inline SolverOptions family_options(RuleFamily f) {
    SolverOptions o;
    o.k = (f == RuleFamily::legendre) ? 5 : 30;
    return o;
}

/// Gamma(g+n) Gamma(z+n) / (Gamma(c+n) Gamma(g+z-c+n)). For n >= 20 the
/// asymptotic series 1 + sum_m (c-g)_m (c-z)_m / (m! (1+c-g-z-n)_m) is
/// summed; smaller n (or a series that does not settle) uses Boost's
/// gamma quotients.
[[nodiscard]] inline double gamma_ratio(double g, double z, double c, double n, int M = 30) {
    auto direct = [&] {
        return boost::math::tgamma_delta_ratio(z + n, g - c) / boost::math::tgamma_delta_ratio(c + n, g - c);
    };
    if (n < 20) return direct();
    double sum = 1.0, term = 1.0;
    for (int m = 1; m <= M; ++m) {
        const double den = m * (1.0 + c - g - z - n + (m - 1));
        if (den == 0.0) return direct();
        term *= (c - g + (m - 1)) * (c - z + (m - 1)) / den;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
    }
    return direct();  // series did not settle within M terms
}

namespace detail {

/// Terminating 2F1(-n, b; c; s) and its s-derivative.
inline std::pair<double, double> hyp2f1_terminating(int n, double b, double c, double s) {
    double term = 1.0, sum = 1.0, dsum = 0.0;
    for (int m = 0; m < n; ++m) {
        // d/ds of term_{m+1} s^{m+1} uses term_{m+1} (m+1) s^m
        const double ratio = (-n + m) * (b + m) / ((c + m) * (m + 1.0));
        const double next = term * ratio * s;
        dsum += next * (m + 1.0) / s;
        sum += next;
        term = next;
        if (std::abs(next) <= 1e-18 * std::abs(sum) && (m + 1.0) > 4 && std::abs(ratio * s) < 0.5) break;
    }
    return {sum, dsum};
}

inline std::vector<double> graded_mesh(double theta_min) {
    // gamma_i = (pi/2) 1.01^{i - 3474}, i = 1..3474, restricted to (theta_min, pi/2]
    std::vector<double> br{theta_min};
    for (int i = 1; i <= 3474; ++i) {
        const double g = (i == 3474) ? std::numbers::pi / 2 : std::numbers::pi / 2 * std::pow(1.01, i - 3474);
        if (g > theta_min * (1.0 + 1e-12)) br.push_back(g);
    }
    return br;
}

struct PhaseBundle {
    PhaseFunction phase;
    InversePhase inverse;
    Amplitude amp;
};

inline PhaseBundle make_bundle(const CoefficientProblem& prob, const SolverOptions& opts,
                               std::vector<double> partition, double anchor, double y0, double yp0) {
    PhaseBundle b{build_phase(prob, opts, std::move(partition)), {}, {}};
    b.inverse = invert_phase(b.phase, opts);
    b.amp = fit_amplitude_at(anchor, y0, yp0, b.phase);
    return b;
}

}  // namespace detail

[[nodiscard]] inline QuadratureRule legendre_rule(int n, const SolverOptions& opts = family_options(RuleFamily::legendre),
                                                  unsigned threads = 1) {
    if (n < 1) throw Error(kGaussModule, ErrorKind::invalid_argument, "Legendre order must be >= 1");
    opts.validate();
    const double nd = n;
    const double lambda = nd + 0.5;
    const double gamma1 = std::numbers::pi / 2 * std::pow(1.01, -3473);
    const double theta_min = std::max(gamma1, 0.5 / nd);
    const Interval iv{theta_min, std::numbers::pi / 2};

    CoefficientProblem prob;
    prob.lambda = lambda;
    prob.iv = iv;
    prob.q = [nd, l2 = lambda * lambda](double th) {
        const double c = std::cos(th) / std::sin(th);
        return (0.5 + nd + nd * nd + 0.25 * c * c) / l2;
    };

    // z = P_n(cos th) sqrt(sin th), P_n(cos th) = 2F1(-n, n+1; 1; sin^2(th/2))
    const double s = std::sin(0.5 * theta_min) * std::sin(0.5 * theta_min);
    const auto [F, dF] = detail::hyp2f1_terminating(n, nd + 1.0, 1.0, s);
    const double sn = std::sin(theta_min), cs = std::cos(theta_min);
    const double z0 = F * std::sqrt(sn);
    const double zp0 = dF * 0.5 * sn * std::sqrt(sn) + F * cs / (2.0 * std::sqrt(sn));

    auto b = detail::make_bundle(prob, opts, detail::graded_mesh(theta_min), theta_min, z0, zp0);
    const long half = n / 2;
    const auto span = root_span(b.phase, b.amp);
    if (span.count < half) {
        throw Error(kGaussModule, ErrorKind::internal_bound_violation,
                    "phase holds " + std::to_string(span.count) + " roots, expected " + std::to_string(half));
    }
    const auto roots = roots_range(b.phase, b.inverse, b.amp, 1, half, threads);

    QuadratureRule rule;
    rule.n = n;
    rule.family = RuleFamily::legendre;
    rule.phase_pieces = b.phase.alpha1.pieces();
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const double d1sq = b.amp.d1 * b.amp.d1;
    for (long j = 0; j < half; ++j) {
        const double th = roots[j].t;
        const double w = 2.0 * std::sin(th) / (d1sq * b.phase.alpha1(th));
        const double x = std::fma(-std::sin(th), roots[j].t_lo, std::cos(th));  // cos(th + lo)
        rule.nodes[j] = -x;
        rule.weights[j] = w;
        rule.nodes[n - 1 - j] = x;
        rule.weights[n - 1 - j] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[half] = 0.0;
        rule.weights[half] = 2.0 / (d1sq * b.phase.alpha1(std::numbers::pi / 2));
    }
    return rule;
}

namespace detail {

/// Phase for u = P_n^{(p1,p2)}(cos th) sin(th/2)^{p1+1/2} cos(th/2)^{p2+1/2} on
/// [theta_min, theta_max], u'' + Q u = 0 with
/// Q = N^2 + (1/4 - p1^2)/(4 sin^2(th/2)) + (1/4 - p2^2)/(4 cos^2(th/2)).
/// Empty when Q <= 0 on the whole interval (small n, large p1): no roots there.
inline std::optional<PhaseBundle> jacobi_bundle(int n, double p1, double p2, double theta_min, double theta_max,
                                                const SolverOptions& opts) {
    const double N = n + 0.5 * (p1 + p2 + 1.0);
    auto Q = [=](double th) {
        const double sh = std::sin(0.5 * th), ch = std::cos(0.5 * th);
        return N * N + (0.25 - p1 * p1) / (4.0 * sh * sh) + (0.25 - p2 * p2) / (4.0 * ch * ch);
    };
    const Interval iv{theta_min, theta_max};
    // end data where Q peaks: for large p2 and small n, Q is negative near theta_max
    double anchor = iv.hi, qmax = Q(iv.hi);
    for (int i = 0; i < 256; ++i) {
        const double th = iv.lo + iv.width() * i / 256.0;
        if (Q(th) > qmax) {
            qmax = Q(th);
            anchor = th;
        }
    }
    if (!(qmax > 0)) return std::nullopt;
    auto prob = CoefficientProblem::from_total(Q, iv, false, anchor);
    auto partition = regularized_partition(Q, iv, prob.lambda * prob.lambda, opts);

    const double s = std::sin(0.5 * theta_min) * std::sin(0.5 * theta_min);
    const auto [F, dF] = hyp2f1_terminating(n, n + p1 + p2 + 1.0, p1 + 1.0, s);
    // binomial(n + p1, n)
    const double binom = 1.0 / (boost::math::tgamma_delta_ratio(n + 1.0, p1) * boost::math::tgamma(p1 + 1.0));
    const double sh = std::sin(0.5 * theta_min), ch = std::cos(0.5 * theta_min);
    const double r = std::pow(sh, p1 + 0.5) * std::pow(ch, p2 + 0.5);
    const double rlog = 0.5 * (p1 + 0.5) * ch / sh - 0.5 * (p2 + 0.5) * sh / ch;
    const double z0 = binom * F * r;
    const double zp0 = binom * r * (dF * sh * ch + F * rlog);
    return make_bundle(prob, opts, std::move(partition), theta_min, z0, zp0);
}

struct HalfRoots {
    std::vector<double> theta;
    std::vector<double> theta_lo;
    std::vector<double> weight;  // without the constant prefactor
};

inline HalfRoots jacobi_half(const std::optional<PhaseBundle>& ob, double p1, double p2, unsigned threads) {
    HalfRoots h;
    if (!ob) return h;
    const PhaseBundle& b = *ob;
    const auto span = root_span(b.phase, b.amp);
    const long first = span.root_at_a ? 2 : 1;
    const auto roots = roots_range(b.phase, b.inverse, b.amp, first, span.count, threads);
    const double d1sq = b.amp.d1 * b.amp.d1;
    for (const auto& rr : roots) {
        const double th = rr.t;
        const double sh = std::sin(0.5 * th), ch = std::cos(0.5 * th);
        const double r2 = std::pow(sh, 2.0 * p1 + 1.0) * std::pow(ch, 2.0 * p2 + 1.0);
        h.theta.push_back(th);
        h.theta_lo.push_back(rr.t_lo);
        h.weight.push_back(r2 / (d1sq * b.phase.alpha1(th)));
    }
    return h;
}

}  // namespace detail

[[nodiscard]] inline QuadratureRule jacobi_rule(int n, double gamma, double zeta,
                                                const SolverOptions& opts = family_options(RuleFamily::jacobi),
                                                unsigned threads = 1) {
    if (n < 1) throw Error(kGaussModule, ErrorKind::invalid_argument, "Jacobi order must be >= 1");
    if (!(gamma > -1.0 && zeta > -1.0) || !std::isfinite(gamma) || !std::isfinite(zeta)) {
        throw Error(kGaussModule, ErrorKind::invalid_argument, "Jacobi parameters must exceed -1");
    }
    opts.validate();
    if (n == 1) {
        QuadratureRule rule;
        rule.n = 1;
        rule.family = RuleFamily::jacobi;
        rule.gamma = gamma;
        rule.zeta = zeta;
        rule.nodes = {(zeta - gamma) / (gamma + zeta + 2.0)};
        rule.weights = {std::exp2(gamma + zeta + 1.0) * boost::math::beta(gamma + 1.0, zeta + 1.0)};
        return rule;
    }
    const double N = n + 0.5 * (gamma + zeta + 1.0);
    const double half_pi = std::numbers::pi / 2;
    const double theta_max = half_pi + std::min(std::numbers::pi / 4, 2.0 / N);
    auto theta_min_for = [&](double p1) {
        // for p1 > 1/3 the start moves out with the turning point near p1/N
        return std::max(0.2 * std::min(1.0, std::sqrt(p1 + 1.0)) * std::max(1.0, 3.0 * p1) / N, 1e-15);
    };

    // upper half (t = cos th > 0) from (gamma, zeta); lower half from (zeta, gamma)
    const auto up_b = detail::jacobi_bundle(n, gamma, zeta, theta_min_for(gamma), theta_max, opts);
    const auto up = detail::jacobi_half(up_b, gamma, zeta, threads);
    std::size_t pieces = up_b ? up_b->phase.alpha1.pieces() : 0;
    detail::HalfRoots lo;
    if (gamma == zeta) {
        lo = up;
    } else {
        const auto lo_b = detail::jacobi_bundle(n, zeta, gamma, theta_min_for(zeta), theta_max, opts);
        lo = detail::jacobi_half(lo_b, zeta, gamma, threads);
        if (lo_b) pieces += lo_b->phase.alpha1.pieces();
    }

    auto count_le = [&](const detail::HalfRoots& h) {
        return static_cast<long>(std::upper_bound(h.theta.begin(), h.theta.end(), half_pi) - h.theta.begin());
    };
    long n_up = count_le(up), n_lo = count_le(lo);
    if (gamma == zeta && n % 2 == 1) {
        // the middle root sits at pi/2 in exact arithmetic; take it once
        n_up = n / 2;
        n_lo = n / 2 + 1;
    } else if (n_up + n_lo == n + 1) {
        // a root at the seam was counted by both halves
        if (half_pi - up.theta[n_up - 1] <= half_pi - lo.theta[n_lo - 1]) --n_lo; else --n_up;
    } else if (n_up + n_lo == n - 1) {
        const double du = n_up < static_cast<long>(up.theta.size()) ? up.theta[n_up] - half_pi : INFINITY;
        const double dl = n_lo < static_cast<long>(lo.theta.size()) ? lo.theta[n_lo] - half_pi : INFINITY;
        if (du <= dl) ++n_up; else ++n_lo;
    }
    if (n_up + n_lo != n || n_up > static_cast<long>(up.theta.size()) || n_lo > static_cast<long>(lo.theta.size())) {
        throw Error(kGaussModule, ErrorKind::internal_bound_violation,
                    "found " + std::to_string(n_up) + " + " + std::to_string(n_lo) + " roots for n = " +
                        std::to_string(n));
    }

    const double K = gamma_ratio(gamma, zeta, 0.0, n + 1.0) * std::exp2(gamma + zeta + 1.0);
    QuadratureRule rule;
    rule.n = n;
    rule.family = RuleFamily::jacobi;
    rule.gamma = gamma;
    rule.zeta = zeta;
    rule.phase_pieces = pieces;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (long j = 0; j < n_lo; ++j) {
        rule.nodes[j] = -std::fma(-std::sin(lo.theta[j]), lo.theta_lo[j], std::cos(lo.theta[j]));
        rule.weights[j] = K * lo.weight[j];
    }
    for (long j = 0; j < n_up; ++j) {
        rule.nodes[n - 1 - j] = std::fma(-std::sin(up.theta[j]), up.theta_lo[j], std::cos(up.theta[j]));
        rule.weights[n - 1 - j] = K * up.weight[j];
    }
    if (gamma == zeta && n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace detail {

/// Series part of L_n^{(g)}(t) = binom(n+g, n) 1F1(-n; g+1; t), with d/dt. t > 0.
inline std::pair<double, double> laguerre_series(int n, double g, double t) {
    double term = 1.0, sum = 1.0, dsum = 0.0;
    for (int m = 0; m < n; ++m) {
        const double next = term * (-n + m) / ((g + 1.0 + m) * (m + 1.0)) * t;
        dsum += next * (m + 1.0) / t;
        sum += next;
        term = next;
        if (next == 0.0) break;
    }
    return {sum, dsum};
}

inline constexpr double kLaguerreUMin = -30.0;

}  // namespace detail

/// Generalized Gauss-Laguerre rule for the weight t^gamma e^{-t} on (0, inf).
/// Nodes below 1 come from z(u) = L(e^u) exp(-e^u/2 + gamma u/2); the rest
/// from y(v) = L(v^2) exp(-v^2/2) v^{1/2+gamma}, handed off at the largest
/// node below 1.
[[nodiscard]] inline QuadratureRule laguerre_rule(int n, double gamma,
                                                  const SolverOptions& opts = family_options(RuleFamily::laguerre),
                                                  unsigned threads = 1) {
    if (n < 1) throw Error(kGaussModule, ErrorKind::invalid_argument, "Laguerre order must be >= 1");
    if (!(gamma > -1.0) || !std::isfinite(gamma)) {
        throw Error(kGaussModule, ErrorKind::invalid_argument, "Laguerre parameter must exceed -1");
    }
    opts.validate();
    const double nd = n;
    // Gamma(n+gamma+1)/Gamma(n+1) and binom(n+gamma, n)
    const double G = 1.0 / boost::math::tgamma_delta_ratio(nd + 1.0, gamma);
    const double binom = G / boost::math::tgamma(gamma + 1.0);

    QuadratureRule rule;
    rule.n = n;
    rule.family = RuleFamily::laguerre;
    rule.gamma = gamma;
    rule.nodes.reserve(n);
    rule.weights.reserve(n);

    auto Q1 = [=](double u) {
        const double e = std::exp(u);
        return 0.5 * e - 0.25 * (gamma - e) * (gamma - e) + nd * e;
    };
    if (n == 1) {
        rule.nodes = {gamma + 1.0};
        rule.weights = {boost::math::tgamma(gamma + 1.0)};
        return rule;
    }
    // The first phase starts a little below the smallest node (about j^2/(4N))
    // rather than at the fixed floor; for gamma < 0 the solution dominates on
    // the left and a distant anchor loses digits.
    const double N = nd + 0.5 * (gamma + 1.0);
    const double t_start = 0.04 * std::min(1.0, gamma + 1.0) * std::max(1.0, gamma * gamma) / N;
    const double u_lo = std::max(detail::kLaguerreUMin, std::log(t_start));
    // Q1 increases in e^u on u <= 0, so Q1(0) <= 0 leaves no oscillation there
    double v_lo = 1.0, y_lo = 0.0, yp_lo = 0.0;
    bool handoff_at_root = false;
    if (Q1(0.0) > 0 && u_lo < -0.5) {
        const Interval iv{u_lo, 0.0};
        auto prob = CoefficientProblem::from_total(Q1, iv, false);
        auto partition = regularized_partition(Q1, iv, prob.lambda * prob.lambda, opts);
        const double t0 = std::exp(iv.lo);
        const auto [S, dS] = detail::laguerre_series(n, gamma, t0);
        const double pre = binom * std::exp(-0.5 * t0 + 0.5 * gamma * iv.lo);
        const double z0 = pre * S;
        const double zp0 = pre * (t0 * dS - 0.5 * t0 * S + 0.5 * gamma * S);
        const auto b = detail::make_bundle(prob, opts, std::move(partition), iv.lo, z0, zp0);
        rule.phase_pieces += b.phase.alpha1.pieces();
        const auto span = root_span(b.phase, b.amp);
        const long first = span.root_at_a ? 2 : 1;
        const long last = span.count;
        if (last - first + 1 > n) {
            throw Error(kGaussModule, ErrorKind::internal_bound_violation, "too many roots below 1");
        }
        const auto roots = roots_range(b.phase, b.inverse, b.amp, first, last, threads);
        const double d1sq = b.amp.d1 * b.amp.d1;
        for (const auto& rr : roots) {
            const double e = std::exp(rr.t);
            const double t = std::fma(e, rr.t_lo, e);
            rule.nodes.push_back(t);
            rule.weights.push_back(G * std::exp(-t + (1.0 + gamma) * rr.t) / (d1sq * b.phase.alpha1(rr.t)));
        }
        if (!roots.empty()) {
            // y(v) = z(2 log v) v^{1/2}, so y'(v*) = 2 z'(u*) / sqrt(v*)
            v_lo = std::sqrt(rule.nodes.back());
            yp_lo = 2.0 * roots.back().yprime / std::sqrt(v_lo);
        } else {
            // no nodes below 1: continue from z(0), z'(0); y(1) = z(0), y'(1) = 2 z'(0) + z(0)/2
            const double a0 = b.phase.alpha(0.0), a1 = b.phase.alpha1(0.0), a2 = b.phase.alpha2(0.0);
            const double sn = std::sin(a0 + b.amp.d2), cs = std::cos(a0 + b.amp.d2);
            const double z = b.amp.d1 * sn / std::sqrt(a1);
            const double zp = b.amp.d1 * (cs * std::sqrt(a1) - sn * a2 / (2.0 * a1 * std::sqrt(a1)));
            y_lo = z;
            yp_lo = 2.0 * zp + 0.5 * z;
        }
        handoff_at_root = true;
    }
    if (!handoff_at_root) {
        // first phase skipped: start the second at v = 1 from the series
        const auto [S, dS] = detail::laguerre_series(n, gamma, 1.0);
        const double e = binom * std::exp(-0.5);
        y_lo = e * S;
        yp_lo = e * (2.0 * dS + (gamma - 0.5) * S);
    }

    const long remaining = n - static_cast<long>(rule.nodes.size());
    if (remaining > 0) {
        const double bound = 2.0 * nd + gamma - 2.0 + std::sqrt(1.0 + 4.0 * (nd - 1.0) * (nd + gamma - 1.0));
        auto Q2 = [=](double v) {
            return 2.0 + 2.0 * gamma + 4.0 * nd + (1.0 - 4.0 * gamma * gamma) / (4.0 * v * v) - v * v;
        };
        const double v_hi = std::sqrt(bound) * (1.0 + 1e-8);
        if (!(v_hi > v_lo)) {
            throw Error(kGaussModule, ErrorKind::internal_bound_violation, "empty interval for the large nodes");
        }
        const Interval iv{v_lo, v_hi};
        // Q2 is small next to v_hi (just short of the turning point); take the
        // end data where Q2 peaks, v^4 = (4 gamma^2 - 1)/4
        const double v_peak = gamma * gamma > 0.25 ? std::pow(gamma * gamma - 0.25, 0.25) : 0.0;
        auto prob = CoefficientProblem::from_total(Q2, iv, false, std::clamp(v_peak, v_lo, v_hi));
        auto partition = regularized_partition(Q2, iv, prob.lambda * prob.lambda, opts);
        const auto b = detail::make_bundle(prob, opts, std::move(partition), v_lo, y_lo, yp_lo);
        rule.phase_pieces += b.phase.alpha1.pieces();
        const auto span = root_span(b.phase, b.amp);
        const long first = span.root_at_a ? 2 : 1;
        const long last = first + remaining - 1;
        if (span.count < last) {
            throw Error(kGaussModule, ErrorKind::internal_bound_violation,
                        "found " + std::to_string(span.count - first + 1) + " large nodes, expected " +
                            std::to_string(remaining));
        }
        const auto roots = roots_range(b.phase, b.inverse, b.amp, first, last, threads);
        const double d1sq = b.amp.d1 * b.amp.d1;
        for (const auto& rr : roots) {
            const double v = rr.t;
            rule.nodes.push_back(std::fma(v, v, 2.0 * v * rr.t_lo));
            // one exponential so that tiny weights degrade gradually into subnormals
            rule.weights.push_back(std::exp(-v * v + (1.0 + 2.0 * gamma) * std::log(v) +
                                            std::log(4.0 * G / (d1sq * b.phase.alpha1(v)))));
        }
    }
    if (static_cast<long>(rule.nodes.size()) != n) {
        throw Error(kGaussModule, ErrorKind::internal_bound_violation, "Laguerre node count mismatch");
    }
    return rule;
}

}  // namespace phaseroot
