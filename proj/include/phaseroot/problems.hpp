#pragma once

#include <cmath>

#include "phaseroot/kummer.hpp"

namespace phaseroot {

/// Test coefficient on [0, 1] with a smooth bump near t = 0.5:
///   q(t) = 1/(0.1 + t^2) + lambda^{-1/2} sin^2(4t) / (0.1 + (t - 1/2)^2)^4
[[nodiscard]] inline CoefficientProblem artificial_problem(double lambda) {
    CoefficientProblem p;
    p.lambda = lambda;
    p.iv = {0.0, 1.0};
    const double scale = 1.0 / std::sqrt(lambda);
    p.q = [scale](double t) {
        const double s = std::sin(4.0 * t);
        const double d = 0.1 + (t - 0.5) * (t - 0.5);
        const double d2 = d * d;
        return 1.0 / (0.1 + t * t) + scale * s * s / (d2 * d2);
    };
    return p;
}

}  // namespace phaseroot
