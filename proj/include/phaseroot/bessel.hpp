#pragma once

// Positive roots of J_nu via z(u) = J_nu(e^u), z'' + (e^{2u} - nu^2) z = 0,
// anchored at the turning point u = log(nu).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "phaseroot/chebkit.hpp"
#include "phaseroot/error.hpp"
#include "phaseroot/kummer.hpp"
#include "phaseroot/parallel.hpp"
#include "phaseroot/phaseinv.hpp"
#include "phaseroot/rootfind.hpp"

namespace phaseroot {

inline constexpr std::string_view kBesselModule = "bessel";

struct BesselJob {
    double nu = 1.0;
    long count = 1;

    [[nodiscard]] Interval interval() const {
        return {std::log(nu), std::log((static_cast<double>(count) + 0.5 * nu - 0.25) * std::numbers::pi)};
    }
    void validate() const {
        if (!(nu >= 1.0) || !std::isfinite(nu)) {
            throw Error(kBesselModule, ErrorKind::invalid_argument, "order must be >= 1");
        }
        if (count < 1) throw Error(kBesselModule, ErrorKind::invalid_argument, "root count must be >= 1");
    }
};

struct TurningValues {
    double j = 0.0;       // J_nu(nu)
    double jprime = 0.0;  // J_nu'(nu)
    std::size_t nodes = 0;
};

namespace detail {

// odd Taylor coefficients about 0, index = power
inline constexpr std::array<std::pair<int, double>, 20> kFSeries{{
    {3, 0.25660011963983367312},     {7, 0.00097752426529460446901},  {9, 0.000072409204836637368075},
    {11, 7.4478039260541292877e-6},  {13, 7.4130822294291683120e-7},  {15, 7.4423844019777464899e-8},
    {17, 7.4866591579915856176e-9},  {19, 7.5416412192891756316e-10}, {21, 7.6048685642328096017e-11},
    {23, 7.6748139912232122716e-12}, {25, 7.7502621827532506438e-13}, {27, 7.8302824791617646275e-14},
    {29, 7.9141968028287716142e-15}, {31, 8.0015150114119176413e-16}, {33, 8.0918754232915038797e-17},
    {35, 8.1850043476015809121e-18}, {37, 8.2806910066873313948e-19}, {39, 8.3787714493431741020e-20},
    {41, 8.4791173998255356422e-21}, {43, 8.5816281188443686814e-22},
}};
inline constexpr std::array<double, 21> kGSeries{
    1.1547005383792515290,      -0.15396007178390020387,    0.0087977183876514402211,  -0.00019550485305892089380,
    2.1158533880835594567e-6,   -6.2499053924929756260e-8,  -6.3656443812428455450e-10, 2.2758759132327362224e-11,
    2.4787184679428134189e-12,  7.8724157122702157316e-14,  -4.8902412230302702671e-16, -1.5967852233708913396e-16,
    -6.7477875388165444420e-18, -4.0200089103980092440e-20, 1.0036334649691334315e-20,  5.4951264104237736524e-22,
    8.2154967849034327039e-24,  -5.9636859253679905593e-25, -4.3278382850469035000e-26, -9.8551367954340211673e-28,
    3.1576108276869123746e-29,
};

/// F(t) = log((t + s)/sin t) - cot(t) s, s = sqrt(t^2 - sin^2 t), on (0, pi).
inline double turning_F(double t) {
    if (t < 1.0) {
        // c3 t^3 + t^7 (c7 + c9 t^2 + ...), Horner in t^2
        const double t2 = t * t;
        double tail = 0.0;
        for (std::size_t i = kFSeries.size(); i-- > 1;) tail = tail * t2 + kFSeries[i].second;
        return t * t2 * (kFSeries[0].second + t2 * t2 * tail);
    }
    const double sn = std::sin(t);
    const double s = std::sqrt((t - sn) * (t + sn));
    return std::log((t + s) / sn) - std::cos(t) / sn * s;
}

/// (t - sin t cos t) / sqrt(t^2 - sin^2 t).
inline double turning_G(double t) {
    if (t < 1.0) {
        const double t2 = t * t;
        double sum = 0.0;
        for (std::size_t i = kGSeries.size(); i-- > 0;) sum = sum * t2 + kGSeries[i];
        return sum * t;
    }
    const double sn = std::sin(t);
    return (t - sn * std::cos(t)) / std::sqrt((t - sn) * (t + sn));
}

}  // namespace detail

/// J_nu(nu) and J_nu'(nu) from the turning-point integrals
/// (1/pi) int_0^pi exp(-nu F) dt and (1/pi) int_0^pi G exp(-nu F) dt, truncated
/// where nu F exceeds 46 (integrand below 1e-20).
[[nodiscard]] inline TurningValues bessel_turning_values(double nu) {
    if (!(nu >= 1.0) || !std::isfinite(nu)) {
        throw Error(kBesselModule, ErrorKind::invalid_argument, "order must be >= 1");
    }
    constexpr double cut = 46.0;
    double lo = 0.0, hi = std::numbers::pi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (nu * detail::turning_F(mid) > cut) hi = mid; else lo = mid;
    }
    const Interval iv{0.0, hi};
    SolverOptions q;
    q.k = 30;
    q.coeff_tol = 1e-14;
    auto f = [nu](double t) { return std::exp(-nu * detail::turning_F(t)); };
    // 0 < f <= 1 = f(0): resolving 1 + f makes the coefficient test absolute
    const auto breaks = adaptive_partition([&](double t) { return 1.0 + f(t); }, iv, q);
    TurningValues out;
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const Interval piece{breaks[i], breaks[i + 1]};
        const auto x = cheb_nodes(q.k, piece);
        std::vector<double> v0(q.k), v1(q.k);
        for (int j = 0; j < q.k; ++j) {
            v0[j] = f(x[j]);
            v1[j] = v0[j] * detail::turning_G(x[j]);
        }
        s0 += spectral_integral(v0, piece).front();
        s1 += spectral_integral(v1, piece).front();
    }
    out.j = s0 / std::numbers::pi;
    out.jprime = s1 / std::numbers::pi;
    out.nodes = (breaks.size() - 1) * static_cast<std::size_t>(q.k);
    return out;
}

struct BesselPhase {
    PhaseFunction phase;
    InversePhase inverse;
    Amplitude amp;
    BesselJob job;
};

/// Phase for the job's interval with (d1, d2) fixed by J_nu(nu), nu J_nu'(nu).
[[nodiscard]] inline BesselPhase bessel_phase(const BesselJob& job, const SolverOptions& opts) {
    job.validate();
    opts.validate();
    const double nu = job.nu;
    const Interval iv = job.interval();
    auto Q = [nu](double u) { return std::exp(2.0 * u) - nu * nu; };
    auto prob = CoefficientProblem::from_total(Q, iv, false);
    BesselPhase b{build_phase(prob, opts, regularized_partition(Q, iv, nu * nu, opts)), {}, {}, job};
    b.inverse = invert_phase(b.phase, opts);
    const auto tv = bessel_turning_values(nu);
    // z'(u) = e^u J'(e^u)
    b.amp = fit_amplitude_at(iv.lo, tv.j, nu * tv.jprime, b.phase);
    return b;
}

/// First job.count positive roots of J_nu, ascending.
[[nodiscard]] inline std::vector<double> bessel_roots(const BesselJob& job, const SolverOptions& opts,
                                                      unsigned threads = 1) {
    const auto b = bessel_phase(job, opts);
    const auto span = root_span(b.phase, b.amp);
    if (span.count < job.count) {
        throw Error(kBesselModule, ErrorKind::internal_bound_violation,
                    "phase holds " + std::to_string(span.count) + " roots, expected " + std::to_string(job.count));
    }
    std::vector<double> out(static_cast<std::size_t>(job.count));
    parallel_for(out.size(), threads, [&](std::size_t j) {
        const auto [u, lo] = kth_root_split(b.phase, b.inverse, b.amp, static_cast<long>(j) + 1);
        const double e = std::exp(u);
        out[j] = std::fma(e, lo, e);
    });
    return out;
}

[[nodiscard]] inline std::vector<double> bessel_roots(double nu, long count, const SolverOptions& opts = [] {
    SolverOptions o;
    o.k = 30;
    return o;
}(), unsigned threads = 1) {
    return bessel_roots(BesselJob{nu, count}, opts, threads);
}

}  // namespace phaseroot
