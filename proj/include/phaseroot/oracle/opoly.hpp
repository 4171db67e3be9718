#pragma once

// Extended-precision reference values for the classical orthogonal
// polynomials and their Gauss rules: three-term recurrences, Golub-Welsch
// starting values and Newton refinement in double-double.

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "phaseroot/error.hpp"
#include "phaseroot/oracle/ddouble.hpp"

namespace phaseroot::oracle {

inline constexpr std::string_view kOracleModule = "oracle";

enum class Family { legendre, jacobi, laguerre };

struct PolyValue {
    ExtReal value;
    ExtReal derivative;
    int exponent = 0;  // both fields carry an extra factor 2^exponent (Laguerre only)
};

/// p_n(t) and p_n'(t). For Jacobi, params are (a, b) in P_n^{(a,b)}; for
/// Laguerre only a is used (generalized L_n^{(a)}).
[[nodiscard]] inline PolyValue opoly_eval(Family family, int n, double a, double b, const ExtReal& t) {
    if (n < 0) throw Error(kOracleModule, ErrorKind::invalid_argument, "degree must be nonnegative");
    switch (family) {
    case Family::legendre: {
        if (n == 0) return {ExtReal(1.0), ExtReal(0.0)};
        ExtReal pm(1.0), p = t;
        for (int k = 1; k < n; ++k) {
            ExtReal next = (ExtReal(2.0 * k + 1) * t * p - ExtReal(k) * pm) / ExtReal(k + 1.0);
            pm = p;
            p = next;
        }
        // (t^2 - 1) P' = n (t P_n - P_{n-1})
        ExtReal d = ExtReal(n) * (t * p - pm) / (t * t - ExtReal(1.0));
        if (t.hi == 1.0 && t.lo == 0.0) d = ExtReal(0.5 * n * (n + 1.0));
        if (t.hi == -1.0 && t.lo == 0.0) d = ExtReal((n % 2 == 0 ? -0.5 : 0.5) * n * (n + 1.0));
        if (!std::isfinite(p.hi)) throw Error(kOracleModule, ErrorKind::overflow, "Legendre recurrence overflow");
        return {p, d};
    }
    case Family::jacobi: {
        if (n == 0) return {ExtReal(1.0), ExtReal(0.0)};
        const ExtReal A(a), B(b), one(1.0);
        ExtReal pm(1.0);
        ExtReal p = ExtReal(0.5) * (A - B) + ExtReal(0.5) * (A + B + ExtReal(2.0)) * t;
        for (int k = 1; k < n; ++k) {
            const ExtReal K(k);
            const ExtReal s = ExtReal(2.0 * k) + A + B;  // 2k + a + b
            const ExtReal c1 = ExtReal(2.0) * (K + one) * (K + A + B + one) * s;
            const ExtReal c2 = (s + one) * (A * A - B * B);
            const ExtReal c3 = (s + one) * (s + ExtReal(2.0)) * s;
            const ExtReal c4 = ExtReal(2.0) * (K + A) * (K + B) * (s + ExtReal(2.0));
            ExtReal next = ((c2 + c3 * t) * p - c4 * pm) / c1;
            pm = p;
            p = next;
        }
        // (2n+a+b)(1-t^2) P' = n[(a-b) - (2n+a+b) t] P_n + 2(n+a)(n+b) P_{n-1}
        const ExtReal N(n);
        const ExtReal s = ExtReal(2.0 * n) + A + B;
        ExtReal d = (N * ((A - B) - s * t) * p + ExtReal(2.0) * (N + A) * (N + B) * pm) / (s * (one - t * t));
        if (!std::isfinite(p.hi)) throw Error(kOracleModule, ErrorKind::overflow, "Jacobi recurrence overflow");
        return {p, d};
    }
    case Family::laguerre: {
        if (n == 0) return {ExtReal(1.0), ExtReal(0.0)};
        const ExtReal A(a), one(1.0);
        ExtReal pm(1.0);
        ExtReal p = one + A - t;
        int e = 0;
        for (int k = 1; k < n; ++k) {
            const ExtReal K(k);
            ExtReal next = ((ExtReal(2.0 * k + 1) + A - t) * p - (K + A) * pm) / (K + one);
            pm = p;
            p = next;
            if (std::abs(p.hi) > 0x1p400) {
                p = ExtReal(std::ldexp(p.hi, -400), std::ldexp(p.lo, -400));
                pm = ExtReal(std::ldexp(pm.hi, -400), std::ldexp(pm.lo, -400));
                e += 400;
            }
        }
        // t L' = n L_n - (n+a) L_{n-1}
        ExtReal d = (ExtReal(n) * p - (ExtReal(n) + A) * pm) / t;
        if (!std::isfinite(p.hi)) throw Error(kOracleModule, ErrorKind::overflow, "Laguerre recurrence overflow");
        return {p, d, e};
    }
    }
    throw Error(kOracleModule, ErrorKind::invalid_argument, "unknown family");
}

/// Gamma in 80-bit precision, split into double-double (about 1e-19 relative).
[[nodiscard]] inline ExtReal gamma_ext(double x) {
    const long double g = boost::math::tgamma(static_cast<long double>(x));
    const double hi = static_cast<double>(g);
    return quick_two_sum(hi, static_cast<double>(g - static_cast<long double>(hi)));
}

/// B(a+1, b+1) = G(a+1) G(b+1) / G(a+b+2).
[[nodiscard]] inline ExtReal jacobi_beta(double a, double b) {
    const long double g = boost::math::tgamma(static_cast<long double>(a) + 1.0L) *
                          boost::math::tgamma(static_cast<long double>(b) + 1.0L) /
                          boost::math::tgamma(static_cast<long double>(a) + static_cast<long double>(b) + 2.0L);
    const double hi = static_cast<double>(g);
    return quick_two_sum(hi, static_cast<double>(g - static_cast<long double>(hi)));
}

struct OracleRule {
    std::vector<ExtReal> nodes;    // ascending
    std::vector<ExtReal> weights;
    std::vector<ExtReal> derivatives;  // p_n'(node) / 2^exponents[j]
    std::vector<int> exponents;
};

namespace detail {

/// Eigenvalues of the symmetric Jacobi matrix of the monic recurrence.
inline std::vector<double> golub_welsch(Family family, int n, double a, double b) {
    Eigen::VectorXd diag(n), off(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) {
        switch (family) {
        case Family::legendre:
            diag(k) = 0.0;
            if (k + 1 < n) off(k) = (k + 1.0) / std::sqrt((2.0 * k + 1) * (2.0 * k + 3));
            break;
        case Family::jacobi: {
            const double s = 2.0 * k + a + b;
            diag(k) = (s == 0.0 || (s + 2.0) == 0.0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
            if (k + 1 < n) {
                const double j = k + 1.0;
                const double sj = 2.0 * j + a + b;
                off(k) = (k == 0) ? std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / (sj * sj * (sj + 1.0)))
                                  : std::sqrt(4.0 * j * (j + a) * (j + b) * (j + a + b) /
                                              (sj * sj * (sj + 1.0) * (sj - 1.0)));
            }
            break;
        }
        case Family::laguerre:
            diag(k) = 2.0 * k + a + 1.0;
            if (k + 1 < n) off(k) = std::sqrt((k + 1.0) * (k + 1.0 + a));
            break;
        }
    }
    if (n == 1) return {diag(0)};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off.head(n - 1), Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace detail

/// Gauss rule for the family in double-double. Jacobi nodes are for
/// P_n^{(a,b)} with weight (1-t)^a (1+t)^b; Laguerre for t^a e^{-t}.
[[nodiscard]] inline OracleRule rule_oracle(Family family, int n, double a = 0.0, double b = 0.0) {
    if (n < 1 || n > 4000) throw Error(kOracleModule, ErrorKind::invalid_argument, "oracle order out of range");
    if (family == Family::jacobi && !(a > -1 && b > -1)) {
        throw Error(kOracleModule, ErrorKind::invalid_argument, "Jacobi parameters must exceed -1");
    }
    if (family == Family::laguerre && !(a > -1)) {
        throw Error(kOracleModule, ErrorKind::invalid_argument, "Laguerre parameter must exceed -1");
    }
    const auto seeds = detail::golub_welsch(family, n, a, b);
    OracleRule rule;
    rule.nodes.resize(n);
    rule.derivatives.resize(n);
    rule.exponents.assign(n, 0);
    for (int j = 0; j < n; ++j) {
        ExtReal t(seeds[j]);
        PolyValue pv{};
        bool converged = false;
        double prev = INFINITY;
        for (int it = 0; it < 40; ++it) {
            pv = opoly_eval(family, n, a, b, t);
            const ExtReal step = pv.value / pv.derivative;
            const double size = std::abs(step.hi) / std::max(1.0, std::abs(t.hi));
            if (size <= 1e-30 || (size <= 1e-26 && size >= prev)) {
                converged = true;
                break;
            }
            t -= step;
            prev = size;
        }
        pv = opoly_eval(family, n, a, b, t);
        if (!converged) {
            throw Error(kOracleModule, ErrorKind::oracle_failure,
                        "Newton did not converge for node " + std::to_string(j));
        }
        rule.nodes[j] = t;
        rule.derivatives[j] = pv.derivative;
        rule.exponents[j] = pv.exponent;
    }
    for (int j = 1; j < n; ++j) {
        if (!(rule.nodes[j - 1] < rule.nodes[j])) {
            throw Error(kOracleModule, ErrorKind::oracle_failure, "oracle nodes collided");
        }
    }

    // constants in double-double
    const ExtReal one(1.0);
    rule.weights.resize(n);
    switch (family) {
    case Family::legendre:
        for (int j = 0; j < n; ++j) {
            const ExtReal& t = rule.nodes[j];
            const ExtReal& d = rule.derivatives[j];
            rule.weights[j] = ExtReal(2.0) / ((one - t * t) * d * d);
        }
        break;
    case Family::jacobi: {
        // C_n = G(n+a+1) G(n+b+1) / (G(n+a+b+1) n!), built up from n = 1
        ExtReal c = (ExtReal(a) + one) * (ExtReal(b) + one) * jacobi_beta(a, b);
        for (int m = 2; m <= n; ++m) {
            c = c * (ExtReal(m) + ExtReal(a)) * (ExtReal(m) + ExtReal(b)) / ((ExtReal(m) + ExtReal(a) + ExtReal(b)) * ExtReal(m));
        }
        const ExtReal pow2(std::exp2(a + b + 1.0));
        for (int j = 0; j < n; ++j) {
            const ExtReal& t = rule.nodes[j];
            const ExtReal& d = rule.derivatives[j];
            rule.weights[j] = c * pow2 / ((one - t * t) * d * d);
        }
        break;
    }
    case Family::laguerre: {
        // G(n+a+1)/n!
        ExtReal c = gamma_ext(a + 1.0);
        for (int m = 1; m <= n; ++m) c = c * (ExtReal(m) + ExtReal(a)) / ExtReal(m);
        for (int j = 0; j < n; ++j) {
            const ExtReal& t = rule.nodes[j];
            const ExtReal& d = rule.derivatives[j];
            const ExtReal w = c / (t * d * d);
            // scaled derivative: divide by 2^(2 exponent); underflows to 0 far out
            rule.weights[j] = ExtReal(std::ldexp(w.hi, -2 * rule.exponents[j]), std::ldexp(w.lo, -2 * rule.exponents[j]));
        }
        break;
    }
    }
    return rule;
}

}  // namespace phaseroot::oracle
