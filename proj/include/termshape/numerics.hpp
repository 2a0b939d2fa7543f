#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "termshape/errors.hpp"

namespace termshape {

/// Root bracket [lo, hi] with lo < hi.
struct Bracket {
    double lo;
    double hi;
};

/// Real branches of the Lambert W function.
enum class WBranch {
    principal,  // W0, defined for x >= -1/e, value >= -1
    minus_one,  // W-1, defined for x in [-1/e, 0), value <= -1
};

/// Brent's method on a bracketing interval.
///
/// Requires opposite signs at the endpoints (or an endpoint that is already
/// a zero). Converges superlinearly on smooth inputs; the result satisfies
/// |hi - lo| <= tol on exit.
template <typename F>
double brent_root(F&& f, Bracket bracket, double tol = 1e-12) {
    double a = bracket.lo;
    double b = bracket.hi;
    if (!(a < b)) throw ArgumentError("brent_root: bracket must satisfy lo < hi");
    if (!(tol > 0)) throw ArgumentError("brent_root: tol must be positive");

    double fa = f(a);
    double fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb))
        throw NumericalError("brent_root: non-finite function value at bracket endpoint");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0))
        throw BracketingError("brent_root: no sign change in bracket");

    double c = a, fc = fa;
    double d = b - a, e = d;

    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;

        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // inverse quadratic interpolation, falling back to secant
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::fmin(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if (!std::isfinite(fb)) throw NumericalError("brent_root: non-finite function value");
    }
    return b;
}

/// Standard normal CDF via the complementary error function.
/// Absolute error well below 1e-12; saturates cleanly in the tails.
inline double normal_cdf(double z) {
    if (!std::isfinite(z)) {
        if (std::isnan(z)) throw DomainError("normal_cdf: NaN argument");
        return z > 0 ? 1.0 : 0.0;
    }
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

namespace detail {

/// Series solution of w e^w = x around the branch point x = -1/e, valid for
/// both real branches (sign selects the branch).
inline double lambert_branch_point_series(double x, int sign) {
    const double p = sign * std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
    // w = -1 + p - p^2/3 + 11 p^3/72 - 43 p^4/540
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)));
}

inline double lambert_halley(double x, double w) {
    for (int iter = 0; iter < 60; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (f == 0.0) return w;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double step = f / denom;
        const double wn = w - step;
        if (std::fabs(wn - w) <= 1e-16 * (1.0 + std::fabs(wn))) return wn;
        w = wn;
    }
    return w;
}

}  // namespace detail

/// Real-branch Lambert W: solves w e^w = x.
///
/// Halley iteration seeded with a branch-specific asymptotic guess; the
/// residual |w e^w - x| stays below 1e-12 * max(1, |x|) across both branches.
inline double lambert_w(WBranch branch, double x) {
    const double branch_point = -std::exp(-1.0);
    if (std::isnan(x)) throw DomainError("lambert_w: NaN argument");
    if (x < branch_point) {
        // tolerate the branch point itself up to rounding
        if (x > branch_point * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
            return -1.0;
        throw DomainError("lambert_w: argument below -1/e");
    }

    if (branch == WBranch::principal) {
        if (x == 0.0) return 0.0;
        double w;
        if (x < -0.3) {
            w = detail::lambert_branch_point_series(x, +1);
        } else if (x < 1.0) {
            // series around 0: x (1 - x + 3/2 x^2)
            w = x * (1.0 - x * (1.0 - 1.5 * x));
        } else {
            const double lx = std::log(x);
            const double llx = std::log(lx > 1.0 ? lx : 1.0);
            w = lx - llx + (lx > 1.0 ? llx / lx : 0.0);
        }
        return detail::lambert_halley(x, w);
    }

    // minus_one branch
    if (x >= 0.0) throw DomainError("lambert_w: branch -1 requires x < 0");
    double w;
    if (x < -0.25) {
        w = detail::lambert_branch_point_series(x, -1);
        if (w > -1.0) w = -1.0;
    } else {
        // w ~ log(-x) - log(-log(-x)) for x -> 0-
        const double l1 = std::log(-x);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1;
    }
    return detail::lambert_halley(x, w);
}

/// Deterministic Gaussian draws: N(mean, stdev^2), reproducible per seed.
inline std::vector<double> gaussian_samples(double mean, double stdev, std::size_t n,
                                            std::uint64_t seed) {
    if (stdev < 0) throw DomainError("gaussian_samples: stdev must be non-negative");
    if (n == 0) throw ArgumentError("gaussian_samples: n must be at least 1");
    std::vector<double> out(n, mean);
    if (stdev == 0) return out;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(mean, stdev);
    for (auto& v : out) v = dist(gen);
    return out;
}

}  // namespace termshape
