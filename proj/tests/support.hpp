#pragma once

// Shared test utilities: Gauss-Legendre quadrature, finite differences and
// randomized parameter draws. These are independent oracles; they must not
// reuse the library's evaluation paths beyond the function under test.

#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "termshape/curve.hpp"

namespace testsupport {

struct GaussRule {
    std::vector<double> node;    // on [-1, 1]
    std::vector<double> weight;
};

/// Gauss-Legendre nodes/weights by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.node.resize(n);
    r.weight.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        r.node[i] = -z;
        r.node[n - 1 - i] = z;
        r.weight[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weight[n - 1 - i] = r.weight[i];
    }
    return r;
}

/// Composite Gauss-Legendre integral of f over [0, x].
inline double integrate(const std::function<double(double)>& f, double x, int panels = 64) {
    static const GaussRule rule = gauss_legendre(20);
    double total = 0;
    for (int p = 0; p < panels; ++p) {
        const double a = x * p / panels;
        const double b = x * (p + 1) / panels;
        const double h = 0.5 * (b - a), c = 0.5 * (a + b);
        double s = 0;
        for (std::size_t k = 0; k < rule.node.size(); ++k) s += rule.weight[k] * f(c + h * rule.node[k]);
        total += s * h;
    }
    return total;
}

/// Centered first derivative.
inline double fd1(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Centered second derivative.
inline double fd2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline termshape::CurveParams random_params(termshape::Family family, std::mt19937_64& gen,
                                            double beta_scale = 2.0) {
    std::uniform_real_distribution<double> logtau(std::log(0.1), std::log(5.0));
    std::normal_distribution<double> beta(0.0, beta_scale);
    for (;;) {
        const double tau1 = std::exp(logtau(gen));
        double tau2 = std::exp(logtau(gen));
        double b1 = beta(gen), b2 = beta(gen), b3 = beta(gen);
        switch (family) {
            case termshape::Family::nelson_siegel: b3 = 0; break;
            case termshape::Family::bliss: b2 = 0; break;
            default: break;
        }
        if (b3 != 0 && std::fabs(std::log(tau1 / tau2)) < 1e-3) continue;
        if (family != termshape::Family::nelson_siegel && b3 == 0) continue;
        return termshape::CurveParams(0.01 * beta(gen), b1, b2, b3, tau1, tau2);
    }
}

}  // namespace testsupport
