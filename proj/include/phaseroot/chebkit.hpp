#pragma once

// Piecewise Chebyshev machinery: k-point extremal grids, barycentric
// evaluation, coefficient transforms, adaptive bisection and a spectral
// (integral-equation) solver for linear second order initial value problems.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phaseroot/error.hpp"

namespace phaseroot {

inline constexpr std::string_view kChebModule = "chebkit";

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
            throw Error(kChebModule, ErrorKind::invalid_argument,
                        "interval requires finite lo < hi, got [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
        }
    }

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] double mid() const noexcept { return 0.5 * (lo + hi); }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct SolverOptions {
    int k = 16;                    // Chebyshev points per subinterval
    double coeff_tol = 1e-13;      // trailing-coefficient split threshold
    double nk_tol = 1e-14;         // relative Newton-Kantorovich stopping size
    int nk_max_iters = 12;
    int trap_steps = 0;            // implicit trapezoid steps per piece; 0 means 4k
    double newton_inv_tol = 1e-15; // inverse-phase Newton residual, relative
    int max_depth = 50;            // bisection cap

    [[nodiscard]] int trapezoid_steps() const noexcept { return trap_steps > 0 ? trap_steps : 4 * k; }

    void validate() const {
        if (k < 4) throw Error(kChebModule, ErrorKind::invalid_argument, "order k must be >= 4");
        if (!(coeff_tol > 0 && nk_tol > 0 && newton_inv_tol > 0)) {
            throw Error(kChebModule, ErrorKind::invalid_argument, "tolerances must be positive");
        }
        if (nk_max_iters < 1 || max_depth < 0 || trap_steps < 0) {
            throw Error(kChebModule, ErrorKind::invalid_argument, "iteration limits must be nonnegative");
        }
    }
};

namespace detail {

/// Reference-grid operators on [-1, 1] for the k-point extremal grid,
/// nodes in descending order x_j = cos(j pi / (k-1)).
struct ChebOperators {
    int k = 0;
    std::vector<double> nodes;       // reference nodes, descending
    std::vector<double> bary;        // barycentric weights
    Eigen::MatrixXd to_coeffs;       // values -> Chebyshev coefficients
    Eigen::MatrixXd to_values;       // coefficients -> values
    Eigen::MatrixXd integrate;       // values -> values of the antiderivative vanishing at -1
    Eigen::MatrixXd differentiate;   // values -> values of the derivative
};

// cos(m pi / n) with the argument reduced to keep symmetric nodes exact.
inline double cos_pi_ratio(long m, long n) {
    m %= 2 * n;
    if (m < 0) m += 2 * n;
    // cos(m pi / n) = sin(pi/2 - m pi / n) = sin(pi (n - 2m) / (2n))
    return std::sin(std::numbers::pi * static_cast<double>(n - 2 * m) / static_cast<double>(2 * n));
}

inline std::shared_ptr<const ChebOperators> build_operators(int k) {
    auto ops = std::make_shared<ChebOperators>();
    ops->k = k;
    const long n = k - 1;
    ops->nodes.resize(k);
    ops->bary.resize(k);
    for (int j = 0; j < k; ++j) {
        ops->nodes[j] = cos_pi_ratio(j, n);
        ops->bary[j] = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == k - 1) ? 0.5 : 1.0);
    }

    ops->to_coeffs.resize(k, k);
    ops->to_values.resize(k, k);
    for (int l = 0; l < k; ++l) {
        for (int j = 0; j < k; ++j) {
            const double t = cos_pi_ratio(static_cast<long>(l) * j, n);
            const double wj = (j == 0 || j == k - 1) ? 0.5 : 1.0;
            const double wl = (l == 0 || l == k - 1) ? 0.5 : 1.0;
            ops->to_coeffs(l, j) = 2.0 / static_cast<double>(n) * wl * wj * t;
            ops->to_values(j, l) = t;
        }
    }

    // Antiderivative coefficients, degree k, then evaluated on the grid.
    Eigen::MatrixXd anti = Eigen::MatrixXd::Zero(k + 1, k);
    for (int col = 0; col < k; ++col) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 2);
        c.head(k) = ops->to_coeffs.col(col);
        Eigen::VectorXd big = Eigen::VectorXd::Zero(k + 1);
        big(1) = c(0) - 0.5 * c(2);
        for (int l = 2; l <= k; ++l) big(l) = (c(l - 1) - c(l + 1)) / (2.0 * l);
        double at_minus_one = 0.0;
        for (int l = 1; l <= k; ++l) at_minus_one += (l % 2 == 0 ? 1.0 : -1.0) * big(l);
        big(0) = -at_minus_one;
        anti.col(col) = big;
    }
    Eigen::MatrixXd eval_big(k, k + 1);
    for (int j = 0; j < k; ++j) {
        for (int l = 0; l <= k; ++l) eval_big(j, l) = cos_pi_ratio(static_cast<long>(l) * j, n);
    }
    ops->integrate = eval_big * anti;
    // Exact zero at the left endpoint (last node).
    ops->integrate.row(k - 1).setZero();

    ops->differentiate.resize(k, k);
    for (int i = 0; i < k; ++i) {
        double diag = 0.0;
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            const double ci = (i == 0 || i == k - 1) ? 2.0 : 1.0;
            const double cj = (j == 0 || j == k - 1) ? 2.0 : 1.0;
            // x_i - x_j = 2 sin((i+j) pi / 2n) sin((j-i) pi / 2n)
            const double diff = 2.0 * std::sin(std::numbers::pi * (i + j) / (2.0 * n)) *
                                std::sin(std::numbers::pi * (j - i) / (2.0 * n));
            const double v = (ci / cj) * (((i + j) % 2 == 0) ? 1.0 : -1.0) / diff;
            ops->differentiate(i, j) = v;
            diag -= v;
        }
        ops->differentiate(i, i) = diag;
    }
    return ops;
}

}  // namespace detail

/// Cached reference operators for order k; safe to call from many threads.
[[nodiscard]] inline const detail::ChebOperators& cheb_operators(int k) {
    if (k < 2) throw Error(kChebModule, ErrorKind::invalid_argument, "Chebyshev order must be >= 2");
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const detail::ChebOperators>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[k];
    if (!slot) slot = detail::build_operators(k);
    return *slot;
}

/// The k-point extremal Chebyshev grid on iv, first point iv.hi, last iv.lo.
[[nodiscard]] inline std::vector<double> cheb_nodes(int k, Interval iv) {
    if (k < 2) throw Error(kChebModule, ErrorKind::invalid_argument, "cheb_nodes requires k >= 2");
    const auto& ref = cheb_operators(k).nodes;
    const double mid = iv.mid();
    const double half = 0.5 * iv.width();
    std::vector<double> out(k);
    for (int j = 0; j < k; ++j) out[j] = mid + half * ref[j];
    out.front() = iv.hi;
    out.back() = iv.lo;
    return out;
}

/// Barycentric evaluation on the reference grid; s in [-1, 1].
[[nodiscard]] inline double bary_eval_ref(std::span<const double> values, double s) {
    const int k = static_cast<int>(values.size());
    const auto& ops = cheb_operators(k);
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < k; ++j) {
        const double d = s - ops.nodes[j];
        if (d == 0.0) return values[j];
        const double w = ops.bary[j] / d;
        num += w * values[j];
        den += w;
    }
    return num / den;
}

[[nodiscard]] inline double to_reference(Interval iv, double x) noexcept {
    if (x == iv.hi) return 1.0;
    if (x == iv.lo) return -1.0;
    return (2.0 * x - (iv.lo + iv.hi)) / iv.width();
}

[[nodiscard]] inline double bary_eval(std::span<const double> values, Interval iv, double x) {
    if (!iv.contains(x)) {
        throw Error(kChebModule, ErrorKind::out_of_domain,
                    "bary_eval point " + std::to_string(x) + " outside interval");
    }
    return bary_eval_ref(values, to_reference(iv, x));
}

[[nodiscard]] inline std::vector<double> vals_to_coeffs(std::span<const double> values) {
    const int k = static_cast<int>(values.size());
    const auto& ops = cheb_operators(k);
    Eigen::Map<const Eigen::VectorXd> v(values.data(), k);
    Eigen::VectorXd c = ops.to_coeffs * v;
    return {c.data(), c.data() + k};
}

[[nodiscard]] inline std::vector<double> coeffs_to_vals(std::span<const double> coeffs) {
    const int k = static_cast<int>(coeffs.size());
    const auto& ops = cheb_operators(k);
    Eigen::Map<const Eigen::VectorXd> c(coeffs.data(), k);
    Eigen::VectorXd v = ops.to_values * c;
    return {v.data(), v.data() + k};
}

/// True when a trailing coefficient (indices ceil(k/2) .. k-1) exceeds tol
/// relative to the largest coefficient.
[[nodiscard]] inline bool needs_split(std::span<const double> coeffs, double tol) {
    double cmax = 0.0;
    for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0) return false;
    const std::size_t k = coeffs.size();
    for (std::size_t l = (k + 1) / 2; l < k; ++l) {
        if (!(std::abs(coeffs[l]) / cmax <= tol)) return true;  // NaN splits too
    }
    return false;
}

/// Values of the derivative of the interpolant at the grid nodes.
[[nodiscard]] inline std::vector<double> spectral_derivative(std::span<const double> values, Interval iv) {
    const int k = static_cast<int>(values.size());
    const auto& ops = cheb_operators(k);
    Eigen::Map<const Eigen::VectorXd> v(values.data(), k);
    Eigen::VectorXd d = (2.0 / iv.width()) * (ops.differentiate * v);
    return {d.data(), d.data() + k};
}

/// Values of the antiderivative vanishing at iv.lo, at the grid nodes.
[[nodiscard]] inline std::vector<double> spectral_integral(std::span<const double> values, Interval iv) {
    const int k = static_cast<int>(values.size());
    const auto& ops = cheb_operators(k);
    Eigen::Map<const Eigen::VectorXd> v(values.data(), k);
    Eigen::VectorXd d = (0.5 * iv.width()) * (ops.integrate * v);
    return {d.data(), d.data() + k};
}

/// A function on [breakpoints.front(), breakpoints.back()] stored by its
/// values on the k-point grid of each subinterval (natural grid order).
class PiecewiseCheb {
public:
    PiecewiseCheb() = default;

    PiecewiseCheb(std::vector<double> breakpoints, int k, std::vector<double> values)
        : breaks_(std::move(breakpoints)), k_(k), values_(std::move(values)) {
        if (k_ < 2) throw Error(kChebModule, ErrorKind::invalid_argument, "PiecewiseCheb order must be >= 2");
        if (breaks_.size() < 2) {
            throw Error(kChebModule, ErrorKind::invalid_argument, "PiecewiseCheb needs at least one piece");
        }
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
            if (!(breaks_[i] < breaks_[i + 1])) {
                throw Error(kChebModule, ErrorKind::invalid_argument, "breakpoints must be strictly ascending");
            }
        }
        if (values_.size() != pieces() * static_cast<std::size_t>(k_)) {
            throw Error(kChebModule, ErrorKind::invalid_argument, "value count does not match pieces * k");
        }
    }

    [[nodiscard]] int order() const noexcept { return k_; }
    [[nodiscard]] std::size_t pieces() const noexcept { return breaks_.empty() ? 0 : breaks_.size() - 1; }
    [[nodiscard]] std::size_t node_count() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breaks_; }
    [[nodiscard]] const std::vector<double>& all_values() const noexcept { return values_; }
    [[nodiscard]] Interval domain() const { return {breaks_.front(), breaks_.back()}; }
    [[nodiscard]] Interval piece(std::size_t i) const { return {breaks_[i], breaks_[i + 1]}; }

    [[nodiscard]] std::span<const double> values(std::size_t i) const {
        return {values_.data() + i * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)};
    }

    /// Index of the piece containing x; shared breakpoints resolve left.
    [[nodiscard]] std::size_t locate(double x) const {
        if (!(x >= breaks_.front() && x <= breaks_.back())) {
            throw Error(kChebModule, ErrorKind::out_of_domain,
                        "point " + std::to_string(x) + " outside piecewise domain");
        }
        auto it = std::lower_bound(breaks_.begin() + 1, breaks_.end(), x);
        return static_cast<std::size_t>(it - breaks_.begin()) - 1;
    }

    [[nodiscard]] double eval_piece(std::size_t i, double x) const {
        return bary_eval_ref(values(i), to_reference(piece(i), x));
    }

    [[nodiscard]] double operator()(double x) const { return eval_piece(locate(x), x); }

    /// Largest relative jump between neighbouring pieces at shared breakpoints.
    [[nodiscard]] double max_continuity_gap() const {
        double scale = 0.0;
        for (double v : values_) scale = std::max(scale, std::abs(v));
        double gap = 0.0;
        for (std::size_t i = 0; i + 1 < pieces(); ++i) {
            const double left_end = values(i).front();   // at breaks_[i+1]
            const double right_start = values(i + 1).back();
            gap = std::max(gap, std::abs(left_end - right_start));
        }
        return scale > 0 ? gap / scale : gap;
    }

private:
    std::vector<double> breaks_;
    int k_ = 0;
    std::vector<double> values_;
};

[[nodiscard]] inline double pw_eval(const PiecewiseCheb& f, double x) { return f(x); }

/// Samples fn on the k-point grids of the given breakpoints.
template <class Fn>
[[nodiscard]] PiecewiseCheb sample(Fn&& fn, std::vector<double> breakpoints, int k) {
    std::vector<double> values;
    values.reserve((breakpoints.size() - 1) * static_cast<std::size_t>(k));
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        for (double x : cheb_nodes(k, {breakpoints[i], breakpoints[i + 1]})) values.push_back(fn(x));
    }
    return {std::move(breakpoints), k, std::move(values)};
}

/// F with F(a) = base and F' = f, continuous across pieces.
/// Antiderivative split as base_i + local_i(t) per piece, local_i(lo) = 0 and
/// base_i carried as hi + lo.
struct SplitAntiderivative {
    PiecewiseCheb local;
    std::vector<double> base_hi, base_lo;
};

[[nodiscard]] inline SplitAntiderivative pw_antiderivative_split(const PiecewiseCheb& f, double base) {
    SplitAntiderivative out;
    std::vector<double> vals;
    vals.reserve(f.node_count());
    out.base_hi.reserve(f.pieces());
    out.base_lo.reserve(f.pieces());
    double hi = base, lo = 0.0;
    for (std::size_t i = 0; i < f.pieces(); ++i) {
        auto integral = spectral_integral(f.values(i), f.piece(i));
        out.base_hi.push_back(hi);
        out.base_lo.push_back(lo);
        const double end = integral.front();
        const double s = hi + end;
        const double bb = s - hi;
        lo += (hi - (s - bb)) + (end - bb);
        hi = s;
        vals.insert(vals.end(), integral.begin(), integral.end());
    }
    out.local = PiecewiseCheb(f.breakpoints(), f.order(), std::move(vals));
    return out;
}

[[nodiscard]] inline PiecewiseCheb pw_antiderivative(const PiecewiseCheb& f, double base) {
    std::vector<double> out;
    out.reserve(f.node_count());
    // running offset kept as an unevaluated sum hi + lo so rounding does not
    // accumulate across pieces
    double hi = base, lo = 0.0;
    for (std::size_t i = 0; i < f.pieces(); ++i) {
        auto integral = spectral_integral(f.values(i), f.piece(i));
        const double end = integral.front();
        for (double& v : integral) v = hi + (v + lo);
        const double s = hi + end;
        const double bb = s - hi;
        lo += (hi - (s - bb)) + (end - bb);
        hi = s;
        out.insert(out.end(), integral.begin(), integral.end());
    }
    return {f.breakpoints(), f.order(), std::move(out)};
}

[[nodiscard]] inline PiecewiseCheb pw_derivative(const PiecewiseCheb& f) {
    std::vector<double> out;
    out.reserve(f.node_count());
    for (std::size_t i = 0; i < f.pieces(); ++i) {
        auto d = spectral_derivative(f.values(i), f.piece(i));
        out.insert(out.end(), d.begin(), d.end());
    }
    return {f.breakpoints(), f.order(), std::move(out)};
}

/// Bisects iv until the k-point interpolant of g passes needs_split on
/// every piece. Returns ascending breakpoints.
template <class Fn>
[[nodiscard]] std::vector<double> adaptive_partition(Fn&& g, Interval iv, const SolverOptions& opts) {
    opts.validate();
    struct Pending {
        double lo, hi;
        int depth;
    };
    std::vector<double> breaks{iv.lo};
    std::vector<Pending> stack{{iv.lo, iv.hi, 0}};
    std::vector<double> vals(opts.k);
    while (!stack.empty()) {
        Pending cur = stack.back();
        stack.pop_back();
        const auto nodes = cheb_nodes(opts.k, {cur.lo, cur.hi});
        for (int j = 0; j < opts.k; ++j) vals[j] = g(nodes[j]);
        if (!needs_split(vals_to_coeffs(vals), opts.coeff_tol)) {
            breaks.push_back(cur.hi);
            continue;
        }
        if (cur.depth >= opts.max_depth) {
            throw ResolutionError(kChebModule, cur.lo, cur.hi, "adaptive_partition exceeded max_depth");
        }
        const double mid = 0.5 * (cur.lo + cur.hi);
        if (!(cur.lo < mid && mid < cur.hi)) {
            throw ResolutionError(kChebModule, cur.lo, cur.hi, "subinterval too small to bisect");
        }
        stack.push_back({mid, cur.hi, cur.depth + 1});
        stack.push_back({cur.lo, mid, cur.depth + 1});
    }
    return breaks;
}

struct IvpSolution {
    std::vector<double> delta;    // solution at the grid nodes
    std::vector<double> delta1;   // first derivative
    std::vector<double> delta2;   // second derivative (the spectral unknown)
    double rcond = 1.0;
};

/// Solves d'' + p d' + q d = r on iv with d(lo) = d0, d'(lo) = d0p. The
/// unknown is d'' in the grid basis; d' and d follow by spectral
/// integration, which leaves one dense k x k system.
[[nodiscard]] inline IvpSolution spectral_linear_ivp(std::span<const double> p, std::span<const double> q,
                                                     std::span<const double> r, Interval iv, double d0,
                                                     double d0p) {
    const int k = static_cast<int>(r.size());
    if (static_cast<int>(p.size()) != k || static_cast<int>(q.size()) != k) {
        throw Error(kChebModule, ErrorKind::invalid_argument, "spectral_linear_ivp size mismatch");
    }
    const auto& ops = cheb_operators(k);
    const Eigen::MatrixXd S = (0.5 * iv.width()) * ops.integrate;
    const Eigen::MatrixXd S2 = S * S;
    const auto nodes = cheb_nodes(k, iv);

    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
        A.row(i) += p[i] * S.row(i) + q[i] * S2.row(i);
        const double lin = d0 + d0p * (nodes[i] - iv.lo);
        rhs(i) = r[i] - p[i] * d0p - q[i] * lin;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-18)) {
        throw LinearSolveError(kChebModule, rcond, "spectral_linear_ivp system is singular");
    }
    Eigen::VectorXd sigma = lu.solve(rhs);
    if (!sigma.allFinite()) throw LinearSolveError(kChebModule, rcond, "spectral_linear_ivp produced non-finite values");
    Eigen::VectorXd d1 = S * sigma;
    Eigen::VectorXd d = S2 * sigma;

    IvpSolution out;
    out.delta.resize(k);
    out.delta1.resize(k);
    out.delta2.assign(sigma.data(), sigma.data() + k);
    out.rcond = rcond;
    for (int i = 0; i < k; ++i) {
        out.delta1[i] = d0p + d1(i);
        out.delta[i] = d0 + d0p * (nodes[i] - iv.lo) + d(i);
    }
    return out;
}

}  // namespace phaseroot
