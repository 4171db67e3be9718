#include <gtest/gtest.h>

#include <cmath>

#include "phaseroot/bessel.hpp"
#include "phaseroot/gauss.hpp"
#include "phaseroot/problems.hpp"

using namespace phaseroot;

namespace {

void check_rule(const QuadratureRule& r, double lo, double hi) {
    ASSERT_EQ(static_cast<int>(r.nodes.size()), r.n);
    for (int j = 0; j < r.n; ++j) {
        EXPECT_GT(r.weights[j], 0.0) << j;
        EXPECT_GT(r.nodes[j], lo);
        EXPECT_LT(r.nodes[j], hi);
        if (j > 0) EXPECT_LT(r.nodes[j - 1], r.nodes[j]);
    }
}

/// Zeros of p_n and p_{n+1} interlace.
void check_interlace(const QuadratureRule& a, const QuadratureRule& b) {
    ASSERT_EQ(b.n, a.n + 1);
    for (int j = 0; j < a.n; ++j) {
        EXPECT_LT(b.nodes[j], a.nodes[j]);
        EXPECT_LT(a.nodes[j], b.nodes[j + 1]);
    }
}

}  // namespace

TEST(Property, LegendrePositivityAndInterlacing) {
    for (int n : {1, 2, 3, 7, 20, 49, 99}) {
        const auto a = legendre_rule(n), b = legendre_rule(n + 1);
        check_rule(a, -1.0, 1.0);
        check_interlace(a, b);
    }
}

TEST(Property, JacobiPositivityAndInterlacing) {
    for (auto [g, z] : {std::pair{-0.3, 0.25}, {0.2, 0.5}, {-0.9, 2.5}}) {
        for (int n : {1, 2, 5, 30, 99}) {
            const auto a = jacobi_rule(n, g, z), b = jacobi_rule(n + 1, g, z);
            check_rule(a, -1.0, 1.0);
            check_interlace(a, b);
        }
    }
}

TEST(Property, LaguerrePositivityAndInterlacing) {
    for (double g : {-0.5, 0.0, 2.0}) {
        for (int n : {1, 2, 5, 30, 99}) {
            const auto a = laguerre_rule(n, g), b = laguerre_rule(n + 1, g);
            check_rule(a, 0.0, INFINITY);
            check_interlace(a, b);
        }
    }
}

TEST(Property, ArtificialDerivativeSignsAlternate) {
    for (double lambda : {1e2, 1e4}) {
        const auto ph = build_phase(artificial_problem(lambda), SolverOptions{});
        const auto inv = invert_phase(ph, SolverOptions{});
        const auto [c1, c2] = fit_amplitude(1.0, -3.0, ph);  // generic data, no root at 0
        const auto amp = to_polar(c1, c2);
        const auto roots = all_roots(ph, inv, amp);
        ASSERT_GT(roots.size(), 2u);
        for (std::size_t j = 1; j < roots.size(); ++j) EXPECT_LT(roots[j - 1].yprime * roots[j].yprime, 0.0);
    }
}

TEST(Property, BesselDerivativeSignsAlternate) {
    const auto b = bessel_phase(BesselJob{7.5, 300}, [] {
        SolverOptions o;
        o.k = 30;
        return o;
    }());
    const auto roots = all_roots(b.phase, b.inverse, b.amp);
    ASSERT_GE(roots.size(), 300u);
    // J_nu decreases through its first zero
    EXPECT_LT(roots.front().yprime, 0.0);
    for (std::size_t j = 1; j < roots.size(); ++j) EXPECT_LT(roots[j - 1].yprime * roots[j].yprime, 0.0);
}

TEST(Property, KummerResidualOnFamilies) {
    const auto b = bessel_phase(BesselJob{20.0, 100}, [] {
        SolverOptions o;
        o.k = 30;
        return o;
    }());
    double worst = 0.0;
    const auto& a1 = b.phase.alpha1;
    for (std::size_t i = 0; i < a1.pieces(); ++i) {
        const auto x = cheb_nodes(a1.order(), a1.piece(i));
        for (std::size_t j = 1; j + 1 < x.size(); ++j) {
            // relative to the frequency scale: Q vanishes at the turning point
            const double r = kummer_residual(b.phase, x[j]) * b.phase.problem.total(x[j]);
            worst = std::max(worst, std::abs(r) / (a1(x[j]) * a1(x[j])));
        }
    }
    EXPECT_LE(worst, 1e-9);
}
