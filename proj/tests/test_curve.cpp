#include "termshape/curve.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace termshape;

TEST(CurveParams, ValidationRules) {
    EXPECT_NO_THROW(CurveParams(0, 0, 1, 0, 1.0, 1.0));  // NS ignores tau2 == tau1
    EXPECT_THROW(CurveParams(0, 0, 1, 1, 1.0, 1.0), DegenerateFamilyError);
    EXPECT_THROW(CurveParams(0, 0, 0, 0, 0.0, 1.0), ValidationError);
    EXPECT_THROW(CurveParams(0, 0, 0, 0, 1.0, -2.0), ValidationError);
    EXPECT_THROW(CurveParams(0, NAN, 0, 0, 1.0, 1.0), ValidationError);
}

TEST(CurveParams, FamilyTag) {
    EXPECT_EQ(CurveParams(0, 1, 2, 0, 1, 0.5).family(), Family::nelson_siegel);
    EXPECT_EQ(CurveParams(0, 1, 0, 2, 1, 0.5).family(), Family::bliss);
    EXPECT_EQ(CurveParams(0, 1, 2, 3, 1, 0.5).family(), Family::svensson);
}

TEST(ForwardRate, PointValues) {
    EXPECT_DOUBLE_EQ(forward_rate(CurveParams(0.02, -0.01, 0, 0, 1, 0.5), 0.0), 0.01);
    EXPECT_NEAR(forward_rate(CurveParams(0, 0, 0, 1, 1, 0.5), 0.5), std::exp(-1.0), 1e-15);
    const CurveParams flat(0.03, 0, 0, 0, 1, 0.5);
    for (double x : {0.0, 0.3, 2.0, 17.0}) EXPECT_DOUBLE_EQ(forward_rate(flat, x), 0.03);
}

TEST(ForwardRate, AsymptoteReachesBeta0) {
    std::mt19937_64 gen(3);
    for (int k = 0; k < 200; ++k) {
        const auto p = testsupport::random_params(Family::svensson, gen);
        const double x = 60.0 * std::fmax(p.tau1(), p.tau2());
        EXPECT_NEAR(forward_rate(p, x), p.beta0(), 1e-10);
    }
}

TEST(YieldRate, LimitsAndFlat) {
    const CurveParams p(0.01, 0.02, -0.5, 0.7, 1.3, 0.4);
    EXPECT_NEAR(yield_rate(p, 0.0), p.beta0() + p.beta1(), 1e-15);
    EXPECT_NEAR(yield_rate(p, 1e-12), p.beta0() + p.beta1(), 1e-12);
    EXPECT_DOUBLE_EQ(yield_rate(CurveParams(0.02, 0, 0, 0, 1, 0.5), 7.0), 0.02);
}

TEST(YieldRate, MatchesQuadratureOfForward) {
    std::mt19937_64 gen(5);
    for (int k = 0; k < 50; ++k) {
        const auto p = testsupport::random_params(Family::svensson, gen);
        auto f = [&p](double t) { return forward_rate(p, t); };
        for (double x : {0.01, 0.5, 2.0, 9.0, 50.0}) {
            const double avg = testsupport::integrate(f, x) / x;
            EXPECT_NEAR(yield_rate(p, x), avg, 1e-8);
        }
    }
}

TEST(CurveDerivative, NelsonSiegelHumpLocation) {
    // phi' vanishes at x = tau (1 - beta1/beta2)
    const CurveParams p(0, 0, 1, 0, 1, 0.5);
    EXPECT_NEAR(curve_derivative(CurveKind::forward, p, 1.0), 0.0, 1e-15);
    EXPECT_GT(curve_derivative(CurveKind::forward, p, 0.5), 0.0);
    EXPECT_LT(curve_derivative(CurveKind::forward, p, 1.5), 0.0);
}

TEST(CurveDerivative, FlatIsZero) {
    const CurveParams p(0.05, 0, 0, 0, 2, 0.5);
    for (double x : {0.1, 1.0, 4.0})
        for (auto k : {CurveKind::forward, CurveKind::yield})
            EXPECT_DOUBLE_EQ(curve_derivative(k, p, x), 0.0);
}

TEST(CurveDerivative, MatchesFiniteDifferences) {
    std::mt19937_64 gen(17);
    for (int k = 0; k < 100; ++k) {
        const auto p = testsupport::random_params(Family::svensson, gen);
        for (auto kind : {CurveKind::forward, CurveKind::yield}) {
            auto level = [&](double t) {
                return kind == CurveKind::forward ? forward_rate(p, t) : yield_rate(p, t);
            };
            for (double x : {0.7, 0.05, 1.7, 6.0}) {
                const double h = 2e-6 * (1.0 + x);
                const double fd = testsupport::fd1(level, x, h);
                const double an = curve_derivative(kind, p, x);
                EXPECT_NEAR(an, fd, 1e-6 * std::fmax(std::fabs(an), initial_slope_scale(p) * 1e-3));
            }
        }
    }
}

TEST(CurveDerivative, YieldSeriesWindowIsSmooth) {
    // the series/direct switch at u = 0.1 must not introduce a jump
    const CurveParams p(0, -1.5, 0.8, 1.2, 1.0, 0.5);
    for (double xs : {0.1 * 0.5, 0.1 * 1.0}) {
        const double left = curve_derivative(CurveKind::yield, p, xs * (1.0 - 1e-9));
        const double right = curve_derivative(CurveKind::yield, p, xs * (1.0 + 1e-9));
        EXPECT_NEAR(left, right, 1e-9 * std::fabs(left) + 1e-12);
    }
}

TEST(ToGamma, ExamplesAndError) {
    const auto g = to_gamma(CurveParams(0, -4, 2, 4, 1, 0.5));
    EXPECT_DOUBLE_EQ(g.gamma1, 0.5);
    EXPECT_DOUBLE_EQ(g.gamma2, -1.0);
    EXPECT_EQ(g.beta3_sign, Polarity::positive);

    const auto g2 = to_gamma(CurveParams(0, 0, 0, -1, 1, 0.5));
    EXPECT_DOUBLE_EQ(g2.gamma1, 0.0);
    EXPECT_DOUBLE_EQ(g2.gamma2, 0.0);
    EXPECT_EQ(g2.beta3_sign, Polarity::negative);

    EXPECT_THROW(to_gamma(CurveParams(0, 1, 1, 0, 1, 0.5)), FamilyError);
}

TEST(RegimeOf, BoundariesExactlyAsDefined) {
    EXPECT_EQ(regime_of(CurveParams(0, 0, 0, 1, 1, 0.5)).tag, RegimeTag::scale_regular);
    const auto wsi = regime_of(CurveParams(0, 0, 0, 1, 1, 3));
    EXPECT_EQ(wsi.tag, RegimeTag::weakly_scale_inverted);
    EXPECT_DOUBLE_EQ(wsi.r, 1.0 / 3.0);
    EXPECT_EQ(regime_of(CurveParams(0, 0, 0, 1, 1, 3.6)).tag, RegimeTag::strongly_scale_inverted);
    EXPECT_THROW(regime_of(CurveParams(0, 0, 1, 0, 1, 1)), DegenerateFamilyError);
}

TEST(InitialSlope, ForwardAndYieldAgreeInSign) {
    std::mt19937_64 gen(23);
    for (int k = 0; k < 500; ++k) {
        const auto p = testsupport::random_params(Family::svensson, gen);
        const double vf = initial_slope_value(CurveKind::forward, p);
        const double vy = initial_slope_value(CurveKind::yield, p);
        EXPECT_DOUBLE_EQ(vy, 0.5 * vf);
        // small-x derivative signs agree with the analytic initial slope
        const double eps = 1e-7 * std::fmin(p.tau1(), p.tau2());
        if (std::fabs(vf) > 1e-6 * initial_slope_scale(p)) {
            EXPECT_GT(curve_derivative(CurveKind::forward, p, eps) * vf, 0.0);
            EXPECT_GT(curve_derivative(CurveKind::yield, p, eps) * vf, 0.0);
        }
    }
}
