#include "termshape/shape_scan.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace termshape;

namespace {

// brute-force oracle: sign changes of the derivative on a dense uniform grid
int dense_sign_changes(CurveKind kind, const CurveParams& p, double hi, int n = 200'000) {
    int changes = 0;
    double prev = 0;
    bool have = false;
    for (int j = 1; j <= n; ++j) {
        const double x = hi * j / n;
        const double v = curve_derivative(kind, p, x);
        if (v == 0) continue;
        if (have && (v > 0) != (prev > 0)) ++changes;
        prev = v;
        have = true;
    }
    return changes;
}

}  // namespace

TEST(ClassifyDirect, NelsonSiegelHump) {
    const auto s = classify_direct(CurveKind::forward, CurveParams(0, 0, 1, 0, 1, 0.5));
    EXPECT_EQ(s.tag, ShapeTag::h);
    ASSERT_EQ(s.extrema.size(), 1u);
    EXPECT_NEAR(s.extrema[0].x, 1.0, 1e-9);
    EXPECT_EQ(s.extrema[0].kind, ExtremumKind::hump);
}

TEST(ClassifyDirect, NelsonSiegelMonotone) {
    // beta1 >= beta2 > 0 leaves no positive root of the derivative and a
    // negative slope everywhere on (0, inf): inverse
    const auto s = classify_direct(CurveKind::forward, CurveParams(0, 2, 1, 0, 1, 0.5));
    EXPECT_EQ(s.tag, ShapeTag::i);
    EXPECT_TRUE(s.extrema.empty());
    const auto n = classify_direct(CurveKind::forward, CurveParams(0, -2, -1, 0, 1, 0.5));
    EXPECT_EQ(n.tag, ShapeTag::n);
}

TEST(ClassifyDirect, FlatCurve) {
    const auto s = classify_direct(CurveKind::forward, CurveParams(0.04, 0, 0, 0, 1, 0.5));
    EXPECT_EQ(s.tag, ShapeTag::flat);
}

TEST(ClassifyDirect, SvenssonHdhPocket) {
    // gamma = (0.05, -0.5) sits in the hdh pocket of the scale-regular map
    const CurveParams p(0, -0.5, 0.05, 1, 1, 0.5);
    EXPECT_EQ(dense_sign_changes(CurveKind::forward, p, 40.0), 3);
    const auto s = classify_direct(CurveKind::forward, p);
    EXPECT_EQ(s.tag, ShapeTag::hdh);
    ASSERT_EQ(s.extrema.size(), 3u);
    EXPECT_EQ(s.extrema[0].kind, ExtremumKind::hump);
    EXPECT_EQ(s.extrema[1].kind, ExtremumKind::dip);
    EXPECT_EQ(s.extrema[2].kind, ExtremumKind::hump);
    EXPECT_LT(s.extrema[0].x, s.extrema[1].x);
    EXPECT_LT(s.extrema[1].x, s.extrema[2].x);
}

TEST(ClassifyDirect, RootBeyondHeuristicHorizon) {
    // gamma = (0.001, -5): the single hump sits near x = 5000, far past the
    // nominal scan horizon; the terminal-sign hunt must still find it
    const CurveParams p(0, -5, 0.001, 1, 1, 0.5);
    const auto s = classify_direct(CurveKind::forward, p);
    EXPECT_EQ(s.tag, ShapeTag::h);
    ASSERT_EQ(s.extrema.size(), 1u);
    EXPECT_NEAR(s.extrema[0].x, 5001.0, 5.0);
}

TEST(ClassifyDirect, ExtremaCapsOnRandomDraws) {
    std::mt19937_64 gen(31);
    for (auto family : {Family::nelson_siegel, Family::bliss, Family::svensson}) {
        const std::size_t cap = family_extrema_cap(family);
        for (int k = 0; k < 1000; ++k) {
            const auto p = testsupport::random_params(family, gen);
            for (auto kind : {CurveKind::forward, CurveKind::yield}) {
                const auto s = classify_direct(kind, p);
                EXPECT_LE(s.extrema.size(), cap);
            }
        }
    }
}

TEST(ClassifyDirect, YieldNeverRougherThanForward) {
    std::mt19937_64 gen(37);
    for (int k = 0; k < 800; ++k) {
        const auto p = testsupport::random_params(Family::svensson, gen);
        const auto f = classify_direct(CurveKind::forward, p);
        const auto y = classify_direct(CurveKind::yield, p);
        EXPECT_LE(y.extrema.size(), f.extrema.size());
        if (y.extrema.size() == f.extrema.size()) {
            for (std::size_t j = 0; j < y.extrema.size(); ++j)
                EXPECT_EQ(y.extrema[j].kind, f.extrema[j].kind);
        }
    }
}

TEST(InitialSlopeSign, Examples) {
    EXPECT_EQ(initial_slope_sign(CurveKind::forward, CurveParams(0, 0, 0, 1, 1, 0.5)),
              SlopeSign::positive);
    EXPECT_EQ(initial_slope_sign(CurveKind::forward, CurveParams(0, 1.3, 1.3, 0, 1, 0.5)),
              SlopeSign::zero);
    EXPECT_EQ(initial_slope_sign(CurveKind::forward, CurveParams(0, 1, 0, 0, 1, 0.5)),
              SlopeSign::negative);
    EXPECT_EQ(initial_slope_sign(CurveKind::yield, CurveParams(0, 0, 0, 1, 1, 0.5)),
              SlopeSign::positive);
}

TEST(ScanBasis, AgreesWithPlainClassifier) {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> gdist(-8.0, 8.0);
    for (auto kind : {CurveKind::forward, CurveKind::yield}) {
        for (double tau2 : {0.5, 3.0, 3.6}) {
            const ScanBasis basis(kind, 1.0, tau2, 400.0);
            for (int k = 0; k < 60; ++k) {
                const double g1 = gdist(gen), g2 = gdist(gen);
                const double b3 = k % 2 == 0 ? 0.7 : -0.7;
                const CurveParams p(0, g2 * b3, g1 * b3, b3, 1.0, tau2);
                const auto a = basis.classify(b3, g1, g2);
                const auto b = classify_direct(kind, p);
                EXPECT_EQ(a.tag, b.tag) << to_string(kind) << " tau2=" << tau2 << " gamma=("
                                        << g1 << "," << g2 << ") b3=" << b3;
            }
        }
    }
}

TEST(TchebycheffSystem, ClosedFormWronskiansPositive) {
    // W(f1), W(f1,f2), W(f1,f2,f3), W(f1,f2,f3,f4) per the closed forms
    std::mt19937_64 gen(43);
    std::uniform_real_distribution<double> logtau(std::log(0.1), std::log(5.0));
    std::uniform_real_distribution<double> xdist(0.0, 20.0);
    for (int k = 0; k < 1000; ++k) {
        const double t1 = std::exp(logtau(gen));
        double t2 = std::exp(logtau(gen));
        if (t1 == t2) t2 *= 1.5;
        const double x = xdist(gen);
        const double w1 = std::exp(-x / t1) / t1;
        const double w2 = std::exp(-2.0 * x / t1) / std::pow(t1, 3);
        const double w3 = std::pow(t2 - t1, 2) / (std::pow(t1, 5) * std::pow(t2, 3)) *
                          std::exp(-x * (2.0 / t1 + 1.0 / t2));
        const double w4 = std::pow(t2 - t1, 4) / (std::pow(t1, 7) * std::pow(t2, 7)) *
                          std::exp(-2.0 * x * (1.0 / t1 + 1.0 / t2));
        EXPECT_GT(w1, 0.0);
        EXPECT_GT(w2, 0.0);
        EXPECT_GT(w3, 0.0);
        EXPECT_GT(w4, 0.0);
    }
}
