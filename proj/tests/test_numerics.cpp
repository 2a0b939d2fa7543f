#include "termshape/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace termshape;

TEST(BrentRoot, LinearFunction) {
    const double x = brent_root([](double t) { return t - 1.0; }, {0.0, 2.0}, 1e-12);
    EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(BrentRoot, CosineRoot) {
    const double x = brent_root([](double t) { return std::cos(t); }, {1.0, 2.0});
    EXPECT_NEAR(x, 1.5707963267948966, 1e-12);
}

TEST(BrentRoot, NoSignChangeThrows) {
    EXPECT_THROW(brent_root([](double t) { return t * t + 1.0; }, {0.0, 1.0}), BracketingError);
    EXPECT_THROW(brent_root([](double t) { return std::log(t - 0.5); }, {0.0, 1.0}),
                 NumericalError);
}

TEST(BrentRoot, EndpointZeroAccepted) {
    const double x = brent_root([](double t) { return t; }, {0.0, 1.0});
    EXPECT_EQ(x, 0.0);
}

TEST(BrentRoot, PolynomialResiduals) {
    // residual <= 10 * tol * local Lipschitz scale on polynomial test functions
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> root(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        const double r = root(gen);
        const double a = 1.0 + std::fabs(root(gen));
        auto f = [r, a](double t) { return a * (t - r) * ((t - r) * (t - r) + 1.0); };
        const double x = brent_root(f, {r - 1.5, r + 2.0}, 1e-12);
        const double lipschitz = a * (3.0 * (x - r) * (x - r) + 1.0);
        EXPECT_LE(std::fabs(f(x)), 10.0 * 1e-12 * std::fmax(lipschitz, 1.0));
    }
}

TEST(NormalCdf, CenterAndReference) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-12);
}

TEST(NormalCdf, TailSaturation) {
    EXPECT_EQ(normal_cdf(-40.0), 0.0);
    EXPECT_EQ(normal_cdf(40.0), 1.0);
}

TEST(NormalCdf, MonotoneAndSymmetricOnGrid) {
    double prev = -1.0;
    for (int i = 0; i <= 1600; ++i) {
        const double z = -8.0 + i * 0.01;
        const double p = normal_cdf(z);
        EXPECT_GE(p, prev);
        EXPECT_NEAR(p + normal_cdf(-z), 1.0, 1e-14);
        prev = p;
    }
}

TEST(LambertW, FixedPoints) {
    EXPECT_EQ(lambert_w(WBranch::principal, 0.0), 0.0);
    EXPECT_NEAR(lambert_w(WBranch::principal, std::exp(1.0)), 1.0, 1e-14);
    EXPECT_NEAR(lambert_w(WBranch::minus_one, -std::exp(-1.0)), -1.0, 1e-7);
}

TEST(LambertW, DomainErrors) {
    EXPECT_THROW(lambert_w(WBranch::principal, -1.0), DomainError);
    EXPECT_THROW(lambert_w(WBranch::minus_one, 0.5), DomainError);
    EXPECT_THROW(lambert_w(WBranch::minus_one, 0.0), DomainError);
}

TEST(LambertW, ResidualProperty) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double bp = -std::exp(-1.0);
    for (int k = 0; k < 1000; ++k) {
        // principal branch: spread from near the branch point to large arguments
        const double x0 = bp + (std::pow(10.0, 8.0 * u(gen)) - 1.0) * 1e-2;
        const double w0 = lambert_w(WBranch::principal, x0);
        EXPECT_GE(w0, -1.0 - 1e-12);
        EXPECT_LE(std::fabs(w0 * std::exp(w0) - x0), 1e-12 * std::fmax(1.0, std::fabs(x0)));

        // minus-one branch: x in (bp, 0)
        const double xm = bp * std::pow(u(gen), 3.0);
        if (xm < 0) {
            const double wm = lambert_w(WBranch::minus_one, xm);
            EXPECT_LE(wm, -1.0 + 1e-12);
            EXPECT_LE(std::fabs(wm * std::exp(wm) - xm), 1e-12 * std::fmax(1.0, std::fabs(xm)));
        }
    }
}

TEST(GaussianSamples, DegenerateDistribution) {
    const auto v = gaussian_samples(0.0, 0.0, 5, 7);
    ASSERT_EQ(v.size(), 5u);
    for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(GaussianSamples, LawOfLargeNumbers) {
    const std::size_t n = 100'000;
    const auto v = gaussian_samples(1.0, 2.0, n, 42);
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    EXPECT_NEAR(mean, 1.0, 4.0 * 2.0 / std::sqrt(static_cast<double>(n)));
}

TEST(GaussianSamples, Deterministic) {
    EXPECT_EQ(gaussian_samples(0.5, 1.5, 1000, 99), gaussian_samples(0.5, 1.5, 1000, 99));
    EXPECT_THROW(gaussian_samples(0.0, -1.0, 10, 0), DomainError);
    EXPECT_THROW(gaussian_samples(0.0, 1.0, 0, 0), ArgumentError);
}
