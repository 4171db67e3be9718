#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "phaseroot/chebkit.hpp"

using namespace phaseroot;

TEST(ChebNodes, ThreePointGridOnUnitInterval) {
    auto x = cheb_nodes(3, {0.0, 1.0});
    ASSERT_EQ(x.size(), 3u);
    EXPECT_EQ(x[0], 1.0);
    EXPECT_EQ(x[1], 0.5);
    EXPECT_EQ(x[2], 0.0);
}

TEST(ChebNodes, EndpointsExactAndDescending) {
    auto x = cheb_nodes(16, {-2.5, 7.25});
    EXPECT_EQ(x.front(), 7.25);
    EXPECT_EQ(x.back(), -2.5);
    for (std::size_t i = 1; i < x.size(); ++i) EXPECT_LT(x[i], x[i - 1]);
}

TEST(ChebNodes, RejectsBadInterval) {
    EXPECT_THROW(Interval(1.0, 1.0), Error);
    EXPECT_THROW(cheb_nodes(1, {0.0, 1.0}), Error);
}

TEST(BaryEval, ReproducesPolynomial) {
    Interval iv{0.0, 1.0};
    auto x = cheb_nodes(16, iv);
    std::vector<double> v;
    for (double t : x) v.push_back(t * t * t - 2 * t + 1);
    for (double t : {0.0, 0.123, 0.5, 0.77, 1.0}) {
        EXPECT_NEAR(bary_eval(v, iv, t), t * t * t - 2 * t + 1, 1e-15);
    }
    EXPECT_THROW((void)bary_eval(v, iv, 1.5), Error);
}

TEST(BaryEval, NodeValueReturnedExactly) {
    Interval iv{-1.0, 3.0};
    auto x = cheb_nodes(9, iv);
    std::vector<double> v;
    for (double t : x) v.push_back(std::sin(t));
    for (std::size_t j = 0; j < x.size(); ++j) EXPECT_EQ(bary_eval(v, iv, x[j]), v[j]);
}

TEST(Coefficients, ExpLeadingCoefficient) {
    auto x = cheb_nodes(16, {-1.0, 1.0});
    std::vector<double> v;
    for (double t : x) v.push_back(std::exp(t));
    auto c = vals_to_coeffs(v);
    EXPECT_NEAR(c[0], 1.2660658777520084, 1e-15);
    EXPECT_NEAR(c[1], 1.1303182079849700, 1e-15);
    auto back = coeffs_to_vals(c);
    for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(back[j], v[j], 1e-15);
}

TEST(Coefficients, NeedsSplitDetectsUnderresolved) {
    auto smooth = cheb_nodes(16, {0.0, 1.0});
    std::vector<double> v1, v2;
    for (double t : smooth) {
        v1.push_back(t * t * t * t - t);
        v2.push_back(std::cos(60 * t));
    }
    EXPECT_FALSE(needs_split(vals_to_coeffs(v1), 1e-13));
    EXPECT_TRUE(needs_split(vals_to_coeffs(v2), 1e-13));
}

TEST(Piecewise, AntiderivativeOfCosine) {
    auto f = sample([](double t) { return std::cos(t); }, {0.0, 0.25, 0.5, 1.0}, 16);
    auto F = pw_antiderivative(f, 0.0);
    EXPECT_NEAR(F(1.0), 0.8414709848078965, 1e-15);
    EXPECT_NEAR(F(0.3), std::sin(0.3), 1e-15);
    EXPECT_LT(F.max_continuity_gap(), 1e-15);
}

TEST(Piecewise, DerivativeOfSine) {
    auto f = sample([](double t) { return std::sin(3 * t); }, {0.0, 0.5, 1.0}, 20);
    auto d = pw_derivative(f);
    EXPECT_NEAR(d(0.7), 3 * std::cos(2.1), 1e-12);
}

TEST(Piecewise, LocateTiesGoLeft) {
    auto f = sample([](double t) { return t; }, {0.0, 0.5, 1.0}, 4);
    EXPECT_EQ(f.locate(0.5), 0u);
    EXPECT_EQ(f.locate(0.0), 0u);
    EXPECT_EQ(f.locate(1.0), 1u);
    EXPECT_THROW((void)f(1.0000001), Error);
}

TEST(AdaptivePartition, ResolvesOscillation) {
    SolverOptions opts;
    auto g = [](double t) { return std::cos(40 * t); };
    auto br = adaptive_partition(g, {0.0, 1.0}, opts);
    EXPECT_GT(br.size(), 2u);
    auto f = sample(g, br, opts.k);
    for (double t = 0; t <= 1.0; t += 0.01237) EXPECT_NEAR(f(t), g(t), 1e-12);
}

TEST(AdaptivePartition, DepthLimitRaises) {
    SolverOptions opts;
    opts.max_depth = 2;
    auto g = [](double t) { return std::cos(400 * t); };
    EXPECT_THROW((void)adaptive_partition(g, {0.0, 1.0}, opts), ResolutionError);
}

TEST(SpectralIvp, SineSolution) {
    // d'' + d = 0, d(0)=0, d'(0)=1 on [0,1]
    const int k = 16;
    std::vector<double> p(k, 0.0), q(k, 1.0), r(k, 0.0);
    auto sol = spectral_linear_ivp(p, q, r, {0.0, 1.0}, 0.0, 1.0);
    EXPECT_NEAR(sol.delta.front(), std::sin(1.0), 1e-11);
    EXPECT_NEAR(sol.delta1.front(), std::cos(1.0), 1e-11);
}

TEST(SpectralIvp, DampedDecay) {
    // d'' + 4 d' + 3 d = 0, d(0)=1, d'(0)=-3 -> d = exp(-3t)
    const int k = 16;
    std::vector<double> p(k, 4.0), q(k, 3.0), r(k, 0.0);
    auto sol = spectral_linear_ivp(p, q, r, {0.0, 1.0}, 1.0, -3.0);
    EXPECT_NEAR(sol.delta.front(), std::exp(-3.0), 1e-11);
}

TEST(SpectralIvp, ForcedVariableCoefficients) {
    // d = t^3 + 1 solves d'' + t d' - d = 6t + 3t^3 - t^3 - 1
    const int k = 12;
    Interval iv{0.5, 2.0};
    auto x = cheb_nodes(k, iv);
    std::vector<double> p(k), q(k, -1.0), r(k);
    for (int i = 0; i < k; ++i) {
        p[i] = x[i];
        r[i] = 6 * x[i] + 2 * x[i] * x[i] * x[i] - 1;
    }
    auto sol = spectral_linear_ivp(p, q, r, iv, 0.125 + 1, 0.75);
    for (int i = 0; i < k; ++i) {
        EXPECT_NEAR(sol.delta[i], x[i] * x[i] * x[i] + 1, 1e-11);
        EXPECT_NEAR(sol.delta1[i], 3 * x[i] * x[i], 1e-11);
    }
}
