#pragma once

// Nonoscillatory phase functions for y'' + lambda^2 q(t) y = 0.
//
// beta = alpha' satisfies
//   beta'' = 2 Q beta - 2 beta^3 + (3/2) beta'^2 / beta,   Q = lambda^2 q,
// which is solved piece by piece as an initial value problem: first for a
// windowed coefficient from the left end, then for the true coefficient
// from the right end (or an interior anchor) using the first solution's
// terminal values.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phaseroot/chebkit.hpp"
#include "phaseroot/error.hpp"

namespace phaseroot {

inline constexpr std::string_view kKummerModule = "kummer";

struct CoefficientProblem {
    std::function<double(double)> q;  // normalized coefficient
    double lambda = 1.0;
    Interval iv;
    bool require_positive = true;     // families with turning points switch this off
    std::optional<double> anchor;     // where end data are taken; defaults to iv.hi

    [[nodiscard]] double total(double t) const { return lambda * lambda * q(t); }

    /// Wraps a raw total coefficient Q with lambda = sqrt(Q(c)), c the anchor
    /// (the right endpoint unless given).
    static CoefficientProblem from_total(std::function<double(double)> Q, Interval iv,
                                         bool require_positive = true,
                                         std::optional<double> anchor = std::nullopt) {
        if (anchor && !iv.contains(*anchor)) {
            throw Error(kKummerModule, ErrorKind::invalid_argument, "anchor outside the interval");
        }
        const double qb = Q(anchor.value_or(iv.hi));
        if (!(qb > 0)) {
            throw Error(kKummerModule, ErrorKind::nonpositive_coefficient,
                        "total coefficient must be positive at the anchor");
        }
        const double lambda = std::sqrt(qb);
        CoefficientProblem p;
        p.lambda = lambda;
        p.q = [Q = std::move(Q), l2 = qb](double t) { return Q(t) / l2; };
        p.iv = iv;
        p.require_positive = require_positive;
        p.anchor = anchor;
        return p;
    }
};

struct BuildStats {
    std::size_t pieces = 0;
    std::size_t solves = 0;       // trap_init + nk_refine attempts, both passes
    std::size_t bisections = 0;
    std::size_t nk_iterations = 0;
    double max_nk_residual = 0.0;
};

struct PhaseFunction {
    PiecewiseCheb alpha;
    PiecewiseCheb alpha1;
    PiecewiseCheb alpha2;
    SplitAntiderivative alpha_split;  // alpha as base + local, for accurate root solves
    CoefficientProblem problem;
    BuildStats stats;

    [[nodiscard]] Interval domain() const { return alpha1.domain(); }
};

struct KummerState {
    std::vector<double> beta;
    std::vector<double> beta1;
    std::vector<double> residual;
    std::vector<double> delta;
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Smooth step equal to 1 on the left quarter of iv and 0 on the right
/// quarter (to rounding).
[[nodiscard]] inline double window_phi(double t, Interval iv) {
    const double s = (t - iv.lo) / iv.width();
    return 0.5 * (std::erf(24.0 * (s + 0.5)) - std::erf(24.0 * (s - 0.5)));
}

/// phi + (1 - phi) q with the window over `win` (prob.iv by default).
[[nodiscard]] inline double windowed_coefficient(const CoefficientProblem& prob, double t,
                                                 std::optional<Interval> win = std::nullopt) {
    const double q = prob.q(t);
    if (prob.require_positive && !(q > 0)) {
        throw Error(kKummerModule, ErrorKind::nonpositive_coefficient,
                    "coefficient not positive at t=" + std::to_string(t));
    }
    const double phi = window_phi(t, win.value_or(prob.iv));
    return phi + (1.0 - phi) * q;
}

/// Relative residual of Kummer's equation for the stored phase at t.
[[nodiscard]] inline double kummer_residual(const PhaseFunction& phase, double t) {
    const std::size_t i = phase.alpha2.locate(t);
    const double a1 = phase.alpha1.eval_piece(i, t);
    if (!(a1 > 0)) throw Error(kKummerModule, ErrorKind::degenerate_phase, "alpha' is not positive");
    const double a2 = phase.alpha2.eval_piece(i, t);
    const auto d = spectral_derivative(phase.alpha2.values(i), phase.alpha2.piece(i));
    const double a3 = bary_eval(d, phase.alpha2.piece(i), t);
    const double Q = phase.problem.total(t);
    const double ratio = a2 / a1;
    return (Q - a1 * a1 - 0.5 * a3 / a1 + 0.75 * ratio * ratio) / Q;
}

namespace detail {

inline double beta_rhs(double Q, double b, double b1) { return 2.0 * Q * b - 2.0 * b * b * b + 1.5 * b1 * b1 / b; }

inline void check_seed(double b, double b1) {
    if (!(b > 0) || !std::isfinite(b1)) {
        throw Error(kKummerModule, ErrorKind::seed_failure, "beta left the positive half line");
    }
}

}  // namespace detail

/// Low-accuracy march of the beta system by the implicit trapezoid rule,
/// interpolated onto the k-point grid of iv. Q is the total coefficient.
template <class QFn>
[[nodiscard]] std::pair<std::vector<double>, std::vector<double>> trap_init(QFn&& Q, Interval iv, double b0,
                                                                            double b0p, int steps, int k) {
    if (steps <= 0) throw Error(kKummerModule, ErrorKind::invalid_argument, "trap_init requires steps > 0");
    if (!(b0 > 0)) throw Error(kKummerModule, ErrorKind::invalid_argument, "trap_init requires beta(lo) > 0");
    const double h = iv.width() / steps;
    std::vector<double> ts(steps + 1), bs(steps + 1), b1s(steps + 1), b2s(steps + 1);
    double b = b0, b1 = b0p;
    double Qc = Q(iv.lo);
    ts[0] = iv.lo;
    bs[0] = b;
    b1s[0] = b1;
    b2s[0] = detail::beta_rhs(Qc, b, b1);
    for (int s = 1; s <= steps; ++s) {
        const double tn = (s == steps) ? iv.hi : iv.lo + s * h;
        const double Qn = Q(tn);
        const double f2 = b2s[s - 1];
        // unknowns (x, y) = (beta, beta') at tn
        double x = b + h * b1, y = b1 + h * f2;
        if (!(x > 0)) x = b;
        auto residual = [&](double xx, double yy) {
            return std::array<double, 2>{xx - b - 0.5 * h * (b1 + yy),
                                         yy - b1 - 0.5 * h * (f2 + detail::beta_rhs(Qn, xx, yy))};
        };
        auto rnorm = [](const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };
        auto r = residual(x, y);
        const double scale = std::max({std::abs(b), std::abs(b1) * h, 1e-300});
        for (int it = 0; it < 50 && rnorm(r) > 1e-14 * (scale + std::abs(y) * h); ++it) {
            const double dfdx = 2.0 * Qn - 6.0 * x * x - 1.5 * y * y / (x * x);
            const double dfdy = 3.0 * y / x;
            const double j11 = 1.0, j12 = -0.5 * h;
            const double j21 = -0.5 * h * dfdx, j22 = 1.0 - 0.5 * h * dfdy;
            const double det = j11 * j22 - j12 * j21;
            if (!(std::abs(det) > 0) || !std::isfinite(det)) break;
            const double dx = (-r[0] * j22 + r[1] * j12) / det;
            const double dy = (-r[1] * j11 + r[0] * j21) / det;
            double damp = 1.0;
            const double before = rnorm(r);
            bool moved = false;
            for (int half = 0; half < 30; ++half, damp *= 0.5) {
                const double xn = x + damp * dx, yn = y + damp * dy;
                if (!(xn > 0)) continue;
                auto rn = residual(xn, yn);
                if (rnorm(rn) < before || half == 29) {
                    x = xn;
                    y = yn;
                    r = rn;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        detail::check_seed(x, y);
        b = x;
        b1 = y;
        ts[s] = tn;
        bs[s] = b;
        b1s[s] = b1;
        b2s[s] = detail::beta_rhs(Qn, b, b1);
        if (!std::isfinite(b2s[s])) throw Error(kKummerModule, ErrorKind::seed_failure, "non-finite beta''");
    }

    // cubic Hermite onto the Chebyshev grid
    const auto nodes = cheb_nodes(k, iv);
    std::vector<double> beta(k), beta1(k);
    for (int j = 0; j < k; ++j) {
        const double t = nodes[j];
        int s = static_cast<int>(std::floor((t - iv.lo) / h));
        s = std::clamp(s, 0, steps - 1);
        const double hh = ts[s + 1] - ts[s];
        const double u = (t - ts[s]) / hh;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        beta[j] = h00 * bs[s] + h10 * hh * b1s[s] + h01 * bs[s + 1] + h11 * hh * b1s[s + 1];
        beta1[j] = h00 * b1s[s] + h10 * hh * b2s[s] + h01 * b1s[s + 1] + h11 * hh * b2s[s + 1];
        if (j == k - 1) {
            beta[j] = b0;
            beta1[j] = b0p;
        }
        if (!(beta[j] > 0)) throw Error(kKummerModule, ErrorKind::seed_failure, "interpolated seed not positive");
    }
    return {std::move(beta), std::move(beta1)};
}

/// Newton-Kantorovich refinement of a seed on one piece. The unknown is
/// beta'' on the grid; beta' and beta follow by spectral integration from
/// the exact initial data (b0, b0p) at iv.lo.
[[nodiscard]] inline KummerState nk_refine(std::span<const double> Q, const KummerState& seed, Interval iv, double b0,
                                           double b0p, const SolverOptions& opts) {
    const int k = static_cast<int>(Q.size());
    if (seed.beta.size() != Q.size() || seed.beta1.size() != Q.size()) {
        throw Error(kKummerModule, ErrorKind::invalid_argument, "nk_refine size mismatch");
    }
    for (double b : seed.beta) {
        if (!(b > 0)) throw Error(kKummerModule, ErrorKind::invalid_argument, "nk_refine seed must be positive");
    }
    const auto& ops = cheb_operators(k);
    const double half = 0.5 * iv.width();
    const Eigen::MatrixXd S = half * ops.integrate;
    const Eigen::MatrixXd Dm = (1.0 / half) * ops.differentiate;
    Eigen::Map<const Eigen::VectorXd> b1seed(seed.beta1.data(), k);
    Eigen::VectorXd sigma = Dm * b1seed;
    Eigen::VectorXd beta(k), beta1(k), F(k);
    auto reconstruct = [&](const Eigen::VectorXd& sg) {
        beta1 = S * sg;
        beta1.array() += b0p;
        beta = S * beta1;
        beta.array() += b0;
        beta(k - 1) = b0;
        beta1(k - 1) = b0p;
    };
    auto positive = [&] { return (beta.array() > 0).all() && beta.allFinite() && beta1.allFinite(); };
    auto form_residual = [&](const Eigen::VectorXd& sg) {
        for (int i = 0; i < k; ++i) F(i) = sg(i) - detail::beta_rhs(Q[i], beta(i), beta1(i));
    };

    reconstruct(sigma);
    if (!positive()) throw Error(kKummerModule, ErrorKind::iterate_rejected, "seed reconstruction not positive");
    form_residual(sigma);

    KummerState out;
    double prev_update = std::numeric_limits<double>::infinity();
    std::vector<double> p(k), qq(k), r(k);
    Eigen::VectorXd last_delta = Eigen::VectorXd::Zero(k);
    int it = 0;
    for (; it < opts.nk_max_iters; ++it) {
        for (int i = 0; i < k; ++i) {
            const double ratio = beta1(i) / beta(i);
            p[i] = -3.0 * ratio;
            qq[i] = 6.0 * beta(i) * beta(i) - 2.0 * Q[i] + 1.5 * ratio * ratio;
            r[i] = -F(i);
        }
        const auto sol = spectral_linear_ivp(p, qq, r, iv, 0.0, 0.0);
        Eigen::Map<const Eigen::VectorXd> dsig(sol.delta2.data(), k);
        Eigen::Map<const Eigen::VectorXd> dbeta(sol.delta.data(), k);
        const double update = dbeta.cwiseAbs().maxCoeff() / beta.cwiseAbs().maxCoeff();
        if (!std::isfinite(update)) throw Error(kKummerModule, ErrorKind::iterate_rejected, "non-finite correction");
        if (update > prev_update && it >= 1) break;  // stagnation, keep current iterate
        Eigen::VectorXd trial = sigma + dsig;
        reconstruct(trial);
        if (!positive()) {
            throw Error(kKummerModule, ErrorKind::iterate_rejected, "Newton update drove beta nonpositive");
        }
        sigma = trial;
        last_delta = dbeta;
        form_residual(sigma);
        prev_update = update;
        if (update <= opts.nk_tol) {
            ++it;
            break;
        }
    }

    double scale = 0.0;
    for (int i = 0; i < k; ++i) {
        scale = std::max({scale, std::abs(2.0 * Q[i] * beta(i)), 2.0 * beta(i) * beta(i) * beta(i)});
    }
    double worst = 0.0;
    for (int i = 1; i + 1 < k; ++i) worst = std::max(worst, std::abs(F(i)));
    const double rel = scale > 0 ? worst / scale : worst;
    if (!(rel <= 1e-10)) {
        throw Error(kKummerModule, ErrorKind::convergence_failure,
                    "Newton-Kantorovich residual " + std::to_string(rel) + " above 1e-10");
    }
    out.beta.assign(beta.data(), beta.data() + k);
    out.beta1.assign(beta1.data(), beta1.data() + k);
    out.residual.assign(F.data(), F.data() + k);
    out.delta.assign(last_delta.data(), last_delta.data() + k);
    out.iterations = it;
    out.rel_residual = rel;
    return out;
}

namespace detail {

struct PieceSolution {
    double lo, hi;
    std::vector<double> beta, beta1;  // natural grid order (hi first)
};

/// Marches a sequence of pieces. Reversed marches run right to left using
/// the variable u = lo + hi - t on each piece.
template <class QFn>
std::vector<PieceSolution> march(QFn&& Q, const std::vector<double>& breaks, bool reversed, double b0, double b0p,
                                 const SolverOptions& opts, BuildStats& stats) {
    struct Pending {
        double lo, hi;
        int depth;
    };
    const int k = opts.k;
    std::vector<Pending> stack;
    const std::size_t m = breaks.size() - 1;
    // stack top is the next piece to process
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t idx = reversed ? i : m - 1 - i;
        stack.push_back({breaks[idx], breaks[idx + 1], 0});
    }
    std::vector<PieceSolution> done;
    std::vector<double> Qv(k);
    double cb = b0, cb1 = b0p;
    while (!stack.empty()) {
        const Pending cur = stack.back();
        stack.pop_back();
        const Interval iv{cur.lo, cur.hi};
        const auto tn = cheb_nodes(k, iv);
        for (int j = 0; j < k; ++j) Qv[j] = reversed ? Q(tn[k - 1 - j]) : Q(tn[j]);
        auto Qfun = [&](double u) { return reversed ? Q(cur.lo + cur.hi - u) : Q(u); };

        bool ok = false;
        std::optional<Error> failure;
        KummerState st;
        ++stats.solves;
        try {
            auto [sb, sb1] = trap_init(Qfun, iv, cb, cb1, opts.trapezoid_steps(), k);
            KummerState seed;
            seed.beta = std::move(sb);
            seed.beta1 = std::move(sb1);
            st = nk_refine(Qv, seed, iv, cb, cb1, opts);
            ok = !needs_split(vals_to_coeffs(st.beta), opts.coeff_tol);
            stats.nk_iterations += static_cast<std::size_t>(st.iterations);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::invalid_argument || e.kind() == ErrorKind::nonpositive_coefficient) throw;
            failure = e;
        }
        if (ok) {
            stats.max_nk_residual = std::max(stats.max_nk_residual, st.rel_residual);
            PieceSolution ps{cur.lo, cur.hi, std::move(st.beta), std::move(st.beta1)};
            if (reversed) {
                std::reverse(ps.beta.begin(), ps.beta.end());
                std::reverse(ps.beta1.begin(), ps.beta1.end());
                for (double& v : ps.beta1) v = -v;
                cb = ps.beta.back();       // value at t = lo
                cb1 = -ps.beta1.back();
            } else {
                cb = ps.beta.front();      // value at t = hi
                cb1 = ps.beta1.front();
            }
            done.push_back(std::move(ps));
            continue;
        }
        if (cur.depth >= opts.max_depth) {
            if (failure) throw *failure;
            throw ResolutionError(kKummerModule, cur.lo, cur.hi, "phase not resolved at max_depth");
        }
        const double mid = 0.5 * (cur.lo + cur.hi);
        if (!(cur.lo < mid && mid < cur.hi)) {
            if (failure) throw *failure;
            throw ResolutionError(kKummerModule, cur.lo, cur.hi, "piece too small to bisect");
        }
        ++stats.bisections;
        if (reversed) {
            stack.push_back({cur.lo, mid, cur.depth + 1});
            stack.push_back({mid, cur.hi, cur.depth + 1});
        } else {
            stack.push_back({mid, cur.hi, cur.depth + 1});
            stack.push_back({cur.lo, mid, cur.depth + 1});
        }
    }
    if (reversed) std::reverse(done.begin(), done.end());
    return done;
}

}  // namespace detail

/// Initial breakpoints for a total coefficient Q that may vanish: resolves
/// (Q^2 + scale2^2)^{1/4}, i.e. sqrt|Q| without the kink at a turning point.
template <class QFn>
[[nodiscard]] std::vector<double> regularized_partition(QFn&& Q, Interval iv, double scale2,
                                                        const SolverOptions& opts) {
    return adaptive_partition([&](double t) { return std::pow(Q(t) * Q(t) + scale2 * scale2, 0.25); }, iv, opts);
}

/// Builds alpha, alpha', alpha'' on prob.iv with alpha(a) = 0. Without a
/// partition the initial breakpoints come from adaptive_partition of sqrt(q).
[[nodiscard]] inline PhaseFunction build_phase(const CoefficientProblem& prob, const SolverOptions& opts,
                                               std::optional<std::vector<double>> partition = std::nullopt) {
    opts.validate();
    if (!prob.q) throw Error(kKummerModule, ErrorKind::invalid_argument, "coefficient callback missing");
    if (!(prob.lambda > 0) || !std::isfinite(prob.lambda)) {
        throw Error(kKummerModule, ErrorKind::invalid_argument, "lambda must be positive and finite");
    }
    const Interval iv = prob.iv;
    std::vector<double> breaks;
    if (partition) {
        breaks = std::move(*partition);
        if (breaks.size() < 2 || breaks.front() != iv.lo || breaks.back() != iv.hi) {
            throw Error(kKummerModule, ErrorKind::invalid_argument, "partition must cover the interval");
        }
    } else {
        breaks = adaptive_partition(
            [&](double t) {
                const double q = prob.q(t);
                if (prob.require_positive && !(q > 0)) {
                    throw Error(kKummerModule, ErrorKind::nonpositive_coefficient,
                                "coefficient not positive at t=" + std::to_string(t));
                }
                return std::sqrt(std::abs(q));
            },
            iv, opts);
    }
    const double l2 = prob.lambda * prob.lambda;
    auto checked_total = [&](double t) {
        const double q = prob.q(t);
        if (prob.require_positive && !(q > 0)) {
            throw Error(kKummerModule, ErrorKind::nonpositive_coefficient,
                        "coefficient not positive at t=" + std::to_string(t));
        }
        return l2 * q;
    };

    const double c = prob.anchor.value_or(iv.hi);
    if (!iv.contains(c)) throw Error(kKummerModule, ErrorKind::invalid_argument, "anchor outside the interval");
    if (c > iv.lo && c < iv.hi && !std::binary_search(breaks.begin(), breaks.end(), c)) {
        breaks.insert(std::upper_bound(breaks.begin(), breaks.end(), c), c);
    }
    const auto cpos = std::lower_bound(breaks.begin(), breaks.end(), c);
    const std::vector<double> left(breaks.begin(), cpos + 1), right(cpos, breaks.end());

    PhaseFunction out;
    out.problem = prob;
    double bc = 0.0, bc1 = 0.0;  // beta, beta' at c
    if (c > iv.lo) {
        const Interval win{iv.lo, c};
        auto windowed = [&](double t) { return l2 * windowed_coefficient(prob, t, win); };
        const auto pass1 = detail::march(windowed, left, false, prob.lambda, 0.0, opts, out.stats);
        bc = pass1.back().beta.front();
        bc1 = pass1.back().beta1.front();
    } else {
        // mirrored window: flat next to b, true coefficient next to a
        auto windowed = [&](double t) {
            const double q = prob.q(t);
            if (prob.require_positive && !(q > 0)) {
                throw Error(kKummerModule, ErrorKind::nonpositive_coefficient,
                            "coefficient not positive at t=" + std::to_string(t));
            }
            const double phi = window_phi(iv.lo + iv.hi - t, iv);
            return l2 * (phi + (1.0 - phi) * q);
        };
        const auto pass1 = detail::march(windowed, breaks, true, prob.lambda, 0.0, opts, out.stats);
        bc = pass1.front().beta.back();
        bc1 = pass1.front().beta1.back();
    }
    std::vector<detail::PieceSolution> pass2;
    if (c > iv.lo) pass2 = detail::march(checked_total, left, true, bc, -bc1, opts, out.stats);
    if (c < iv.hi) {
        auto rp = detail::march(checked_total, right, false, bc, bc1, opts, out.stats);
        pass2.insert(pass2.end(), std::make_move_iterator(rp.begin()), std::make_move_iterator(rp.end()));
    }

    std::vector<double> br{pass2.front().lo}, v1, v2;
    v1.reserve(pass2.size() * opts.k);
    v2.reserve(pass2.size() * opts.k);
    for (const auto& ps : pass2) {
        br.push_back(ps.hi);
        v1.insert(v1.end(), ps.beta.begin(), ps.beta.end());
        v2.insert(v2.end(), ps.beta1.begin(), ps.beta1.end());
    }
    out.alpha1 = PiecewiseCheb(br, opts.k, std::move(v1));
    out.alpha2 = PiecewiseCheb(br, opts.k, std::move(v2));
    out.alpha = pw_antiderivative(out.alpha1, 0.0);
    out.alpha_split = pw_antiderivative_split(out.alpha1, 0.0);
    out.stats.pieces = out.alpha1.pieces();
    for (double v : out.alpha1.all_values()) {
        if (!(v > 0)) throw Error(kKummerModule, ErrorKind::degenerate_phase, "alpha' not positive at a node");
    }
    return out;
}

}  // namespace phaseroot
