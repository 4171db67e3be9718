#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "phaseroot/gauss.hpp"
#include "phaseroot/oracle/opoly.hpp"

using namespace phaseroot;
namespace orc = phaseroot::oracle;

namespace {

struct Diff {
    double node = 0.0;    // max abs
    double weight = 0.0;  // max rel
};

Diff compare(const QuadratureRule& r, const orc::OracleRule& o, double floor = 1e-290) {
    Diff d;
    for (int j = 0; j < r.n; ++j) {
        const double x = o.nodes[j].to_double();
        d.node = std::max(d.node, std::abs(r.nodes[j] - x) / std::max(1.0, std::abs(x)));
        const double w = o.weights[j].to_double();
        if (w > floor) d.weight = std::max(d.weight, std::abs(r.weights[j] - w) / w);
    }
    return d;
}

}  // namespace

TEST(GammaRatio, MatchesBoost) {
    const double g = 0.5, z = -0.3;
    for (double n : {5.0, 30.0, 400.0}) {
        // Gamma(g+n) Gamma(z+n) / (Gamma(n) Gamma(g+z+n))
        const double ref = boost::math::tgamma_delta_ratio(z + n, g) / boost::math::tgamma_delta_ratio(n, g);
        EXPECT_NEAR(gamma_ratio(g, z, 0.0, n) / ref, 1.0, 1e-14) << n;
    }
}

TEST(Legendre, SmallOrdersClosedForm) {
    auto r1 = legendre_rule(1);
    EXPECT_NEAR(r1.nodes[0], 0.0, 1e-15);
    EXPECT_NEAR(r1.weights[0], 2.0, 1e-14);
    auto r2 = legendre_rule(2);
    EXPECT_NEAR(r2.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.weights[0], 1.0, 1e-14);
    auto r3 = legendre_rule(3);
    EXPECT_NEAR(r3.nodes[2], std::sqrt(0.6), 1e-15);
    EXPECT_NEAR(r3.weights[1], 8.0 / 9.0, 1e-14);
}

TEST(Legendre, AgainstOracle) {
    for (int n : {10, 100, 1000}) {
        const auto d = compare(legendre_rule(n), orc::rule_oracle(orc::Family::legendre, n));
        EXPECT_LE(d.node, 1e-13) << n;
        EXPECT_LE(d.weight, 1e-13) << n;
    }
}

TEST(Legendre, SymmetricAndExactForPolynomials) {
    const auto r = legendre_rule(64);
    for (int j = 0; j < 32; ++j) {
        EXPECT_NEAR(r.nodes[j], -r.nodes[63 - j], 1e-15);
        EXPECT_NEAR(r.weights[j], r.weights[63 - j], 1e-15);
    }
    for (int m = 0; m <= 126; m += 6) {
        double s = 0.0;
        for (int j = 0; j < 64; ++j) s += r.weights[j] * std::pow(r.nodes[j], m);
        EXPECT_NEAR(s * (m + 1) / 2.0, 1.0, 1e-13) << m;
    }
}

TEST(Jacobi, AgainstOracle) {
    const double params[][2] = {{-0.3, 0.25}, {1.5707963267948966, 1.4142135623730951}, {0.2, 0.5}};
    for (const auto& p : params) {
        const auto d = compare(jacobi_rule(100, p[0], p[1]), orc::rule_oracle(orc::Family::jacobi, 100, p[0], p[1]));
        EXPECT_LE(d.node, 1e-13) << p[0] << "," << p[1];
        EXPECT_LE(d.weight, 1e-13) << p[0] << "," << p[1];
    }
}

TEST(Jacobi, ChebyshevClosedForm) {
    for (int n : {10, 100}) {
        const auto r = jacobi_rule(n, -0.5, -0.5);
        for (int j = 1; j <= n; ++j) {
            // ascending nodes: cos((2j-1) pi / (2n)) descend in j
            EXPECT_NEAR(r.nodes[n - j], std::cos((2.0 * j - 1.0) * std::numbers::pi / (2.0 * n)), 1e-13);
            EXPECT_NEAR(r.weights[n - j], std::numbers::pi / n, 1e-13);
        }
    }
}

TEST(Jacobi, ReducesToLegendre) {
    const auto a = jacobi_rule(50, 0.0, 0.0);
    const auto b = legendre_rule(50);
    for (int j = 0; j < 50; ++j) {
        EXPECT_NEAR(a.nodes[j], b.nodes[j], 1e-14);
        EXPECT_NEAR(a.weights[j], b.weights[j], 1e-13 * b.weights[j]);
    }
}

TEST(Laguerre, SmallOrders) {
    auto r1 = laguerre_rule(1, 0.5);
    EXPECT_DOUBLE_EQ(r1.nodes[0], 1.5);
    EXPECT_NEAR(r1.weights[0], std::tgamma(1.5), 1e-15);
    auto r2 = laguerre_rule(2, 0.0);
    EXPECT_NEAR(r2.nodes[0], 2.0 - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(r2.nodes[1], 2.0 + std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r2.weights[0], (2.0 + std::sqrt(2.0)) / 4.0, 1e-14);
}

TEST(Laguerre, Moments) {
    for (double g : {-0.5, 0.0, 0.5}) {
        const auto r = laguerre_rule(50, g);
        for (int m = 0; m <= 30; m += 3) {
            double s = 0.0;
            for (int j = 0; j < r.n; ++j) s += r.weights[j] * std::pow(r.nodes[j], m);
            const double ref = std::tgamma(m + g + 1.0);
            EXPECT_NEAR(s / ref, 1.0, 1e-11) << g << " m=" << m;
        }
    }
}

TEST(Laguerre, AgainstOracle) {
    for (double g : {-0.9, 0.0, 3.0}) {
        const auto d = compare(laguerre_rule(100, g), orc::rule_oracle(orc::Family::laguerre, 100, g));
        EXPECT_LE(d.node, 1e-12) << g;
        EXPECT_LE(d.weight, 1e-12) << g;
    }
}

TEST(Laguerre, SeriesMatchesOracleAtAnchor) {
    // phase-1 seed: binom(n+g, n) * 1F1(-n; g+1; t) = L_n^{(g)}(t)
    const int n = 100;
    for (double g : {-0.5, 0.5, 3.0}) {
        const double binom = 1.0 / boost::math::tgamma_delta_ratio(n + 1.0, g) / std::tgamma(g + 1.0);
        for (double t : {1e-4, 1e-3, 0.01}) {  // anchors sit below the first node, ~1e-2 / n
            const auto [s, ds] = detail::laguerre_series(n, g, t);
            const auto pv = orc::opoly_eval(orc::Family::laguerre, n, g, 0.0, orc::ExtReal(t));
            const double ref = std::ldexp(pv.value.to_double(), -pv.exponent);
            EXPECT_NEAR(binom * s / ref, 1.0, 1e-13) << g << " t=" << t;
            const double dref = std::ldexp(pv.derivative.to_double(), -pv.exponent);
            EXPECT_NEAR(binom * ds / dref, 1.0, 1e-13) << g << " t=" << t;
        }
    }
}

TEST(Gauss, InvalidArguments) {
    EXPECT_THROW((void)legendre_rule(0), Error);
    EXPECT_THROW((void)jacobi_rule(10, -1.0, 0.0), Error);
    EXPECT_THROW((void)jacobi_rule(0, 0.0, 0.0), Error);
    EXPECT_THROW((void)laguerre_rule(10, -1.5), Error);
    EXPECT_THROW((void)laguerre_rule(-2, 0.0), Error);
    try {
        (void)legendre_rule(-1);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
}

TEST(Gauss, ThreadCountDoesNotChangeResult) {
    const auto a = jacobi_rule(300, 0.2, 0.5, family_options(RuleFamily::jacobi), 1);
    const auto b = jacobi_rule(300, 0.2, 0.5, family_options(RuleFamily::jacobi), 3);
    EXPECT_EQ(a.nodes, b.nodes);
    EXPECT_EQ(a.weights, b.weights);
}

TEST(Jacobi, ExtremeParametersSmallOrders) {
    const double params[][2] = {{-0.9, 2.5}, {30.0, 0.2}, {0.7, 8.0}, {-0.99, 5.0}};
    for (const auto& p : params) {
        for (int n : {1, 2, 3, 7}) {
            const auto d = compare(jacobi_rule(n, p[0], p[1]), orc::rule_oracle(orc::Family::jacobi, n, p[0], p[1]));
            EXPECT_LE(d.node, 1e-13) << p[0] << "," << p[1] << " n=" << n;
            EXPECT_LE(d.weight, 1e-12) << p[0] << "," << p[1] << " n=" << n;
        }
    }
}
