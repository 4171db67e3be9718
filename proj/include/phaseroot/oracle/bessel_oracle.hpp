#pragma once

// Reference values for J_nu and its positive zeros. Small arguments use the
// power series in double-double; larger zeros come from Boost.Math.

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <string>

#include "phaseroot/error.hpp"
#include "phaseroot/oracle/ddouble.hpp"

namespace phaseroot::oracle {

/// Largest argument handled by the double-double series. Terms reach about
/// e^x / sqrt(x) before cancelling, so at 20 about 1e-23 relative remains.
inline constexpr double kSeriesLimit = 20.0;

struct SeriesValue {
    ExtReal value;       // sum_m (-1)^m (x^2/4)^m / (m! (nu+1)_m)
    ExtReal derivative;  // d/dx of the sum
};

/// J_nu(x) = (x/2)^nu / Gamma(nu+1) * S(x); S is returned with S'.
[[nodiscard]] inline SeriesValue bessel_series(double nu, const ExtReal& x) {
    const ExtReal z = x * x / ExtReal(4.0);
    ExtReal term(1.0), sum(1.0), dsum(0.0);
    for (int m = 1; m < 2000; ++m) {
        term = -(term * z) / (ExtReal(m) * (ExtReal(nu) + ExtReal(m)));
        sum += term;
        dsum += ExtReal(2.0 * m) * term / x;  // d/dx of z^m is 2 m z^m / x
        if (std::abs(term.hi) < 1e-34 * std::max(1.0, std::abs(sum.hi)) && m > z.hi) break;
    }
    return {sum, dsum};
}

[[nodiscard]] inline ExtReal bessel_j(double nu, const ExtReal& x) {
    if (!(x.hi <= kSeriesLimit)) throw Error("oracle", ErrorKind::invalid_argument, "series oracle limited to x <= 20");
    const double pref = std::pow(0.5 * x.hi, nu) / boost::math::tgamma(nu + 1.0);
    return ExtReal(pref) * bessel_series(nu, x).value;
}

/// k-th positive zero of J_nu. Below kSeriesLimit the Boost value is refined
/// by double-double Newton on the series; beyond it the Boost value is used.
[[nodiscard]] inline ExtReal bessel_oracle_root(double nu, long k) {
    if (!(nu >= 0) || k < 1) throw Error("oracle", ErrorKind::invalid_argument, "need nu >= 0 and k >= 1");
    const double guess = boost::math::cyl_bessel_j_zero(nu, static_cast<int>(k));
    if (guess > kSeriesLimit) return ExtReal(guess);
    ExtReal x(guess);
    double prev = INFINITY;
    for (int it = 0; it < 30; ++it) {
        const auto s = bessel_series(nu, x);
        const ExtReal step = s.value / s.derivative;
        const double size = std::abs(step.hi) / x.hi;
        if (size <= 1e-30 || (size <= 1e-21 && size >= prev)) return x;
        x -= step;
        prev = size;
    }
    throw Error("oracle", ErrorKind::oracle_failure, "Bessel zero Newton did not converge");
}

}  // namespace phaseroot::oracle
