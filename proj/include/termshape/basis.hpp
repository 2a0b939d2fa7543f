#pragma once

#include <cmath>

namespace termshape::basis {

// Basis functions of the differentiated forward curve:
//   f1 = e^(-x/t1)/t1,  f2 = x e^(-x/t1)/t1^2,
//   f3 = e^(-x/t2)/t2,  f4 = x e^(-x/t2)/t2^2.
inline double f1(double x, double tau1) { return std::exp(-x / tau1) / tau1; }
inline double f2(double x, double tau1) { return x * std::exp(-x / tau1) / (tau1 * tau1); }
inline double f3(double x, double tau2) { return std::exp(-x / tau2) / tau2; }
inline double f4(double x, double tau2) { return x * std::exp(-x / tau2) / (tau2 * tau2); }

/// exp_part(x, tau) = e^(-x/tau)/tau and its x-derivatives.
inline double expp(double x, double tau) { return std::exp(-x / tau) / tau; }
inline double expp_d(double x, double tau) { return -std::exp(-x / tau) / (tau * tau); }
inline double expp_dd(double x, double tau) { return std::exp(-x / tau) / (tau * tau * tau); }

// avg_part(x, tau) = ((x+tau) e^(-x/tau) - tau)/x^2, the derivative of the
// running-average transform of e^(-x/tau). It has a removable singularity at
// x = 0 and the direct formula loses digits to cancellation like (tau/x)^2,
// so below u = x/tau = 0.1 a Taylor series is used; the retained orders keep
// the series truncation near machine precision at the switch.
inline double avg_part(double x, double tau) {
    const double u = x / tau;
    if (u < 0.1) {
        return (-1.0 / 2.0 +
                u * (1.0 / 3.0 +
                     u * (-1.0 / 8.0 +
                          u * (1.0 / 30.0 +
                               u * (-1.0 / 144.0 +
                                    u * (1.0 / 840.0 +
                                         u * (-1.0 / 5760.0 +
                                              u * (1.0 / 45360.0 - u / 403200.0)))))))) /
               tau;
    }
    return ((x + tau) * std::exp(-u) - tau) / (x * x);
}

inline double avg_part_d(double x, double tau) {
    const double u = x / tau;
    if (u < 0.1) {
        return (1.0 / 3.0 +
                u * (-1.0 / 4.0 +
                     u * (1.0 / 10.0 +
                          u * (-1.0 / 36.0 +
                               u * (1.0 / 168.0 +
                                    u * (-1.0 / 960.0 +
                                         u * (1.0 / 6480.0 - u / 50400.0))))))) /
               (tau * tau);
    }
    return (2.0 * tau - std::exp(-u) * (x * x / tau + 2.0 * x + 2.0 * tau)) / (x * x * x);
}

inline double avg_part_dd(double x, double tau) {
    const double u = x / tau;
    if (u < 0.1) {
        return (-1.0 / 4.0 +
                u * (1.0 / 5.0 +
                     u * (-1.0 / 12.0 +
                          u * (1.0 / 42.0 +
                               u * (-1.0 / 192.0 +
                                    u * (1.0 / 1080.0 +
                                         u * (-1.0 / 7200.0 + u / 55440.0))))))) /
               (tau * tau * tau);
    }
    const double x2 = x * x;
    return (std::exp(-u) * (x * x2 / (tau * tau) + 3.0 * x2 / tau + 6.0 * x + 6.0 * tau) -
            6.0 * tau) /
           (x2 * x2);
}

/// Coefficient triple (a, b, c) of the extremum-line family
/// a(x) + b(x) gamma1 + c(x) gamma2 = 0, plus its x-derivatives.
struct Triple {
    double a, b, c;
};

inline Triple abc_forward(double x, double tau1, double tau2) {
    return {(1.0 - x / tau2) * std::exp(-x / tau2) / tau2,
            (1.0 - x / tau1) * std::exp(-x / tau1) / tau1,
            -std::exp(-x / tau1) / tau1};
}

inline Triple abc_forward_d(double x, double tau1, double tau2) {
    return {-(2.0 - x / tau2) * std::exp(-x / tau2) / (tau2 * tau2),
            -(2.0 - x / tau1) * std::exp(-x / tau1) / (tau1 * tau1),
            std::exp(-x / tau1) / (tau1 * tau1)};
}

inline Triple abc_forward_dd(double x, double tau1, double tau2) {
    return {(3.0 - x / tau2) * std::exp(-x / tau2) / (tau2 * tau2 * tau2),
            (3.0 - x / tau1) * std::exp(-x / tau1) / (tau1 * tau1 * tau1),
            -std::exp(-x / tau1) / (tau1 * tau1 * tau1)};
}

inline Triple abc_yield(double x, double tau1, double tau2) {
    const double p1 = avg_part(x, tau1);
    return {avg_part(x, tau2) + expp(x, tau2), p1 + expp(x, tau1), p1};
}

inline Triple abc_yield_d(double x, double tau1, double tau2) {
    const double p1 = avg_part_d(x, tau1);
    return {avg_part_d(x, tau2) + expp_d(x, tau2), p1 + expp_d(x, tau1), p1};
}

inline Triple abc_yield_dd(double x, double tau1, double tau2) {
    const double p1 = avg_part_dd(x, tau1);
    return {avg_part_dd(x, tau2) + expp_dd(x, tau2), p1 + expp_dd(x, tau1), p1};
}

// Pieces for the cancellation-free yield Wronskians at large x. avg_part
// splits exactly as A(x,tau) - tau/x^2 with A purely exponential:
//   A   = (x+tau) e^(-x/tau) / x^2
//   A'  = -e^(-x/tau) (x^2/tau + 2x + 2tau) / x^3
//   A'' =  e^(-x/tau) (x^3/tau^2 + 3x^2/tau + 6x + 6tau) / x^4
struct Col3 {
    double v, d, dd;
};

inline Col3 exp_avg_col(double x, double tau) {
    const double e = std::exp(-x / tau);
    const double x2 = x * x;
    return {(x + tau) * e / x2, -e * (x2 / tau + 2.0 * x + 2.0 * tau) / (x2 * x),
            e * (x2 * x / (tau * tau) + 3.0 * x2 / tau + 6.0 * x + 6.0 * tau) / (x2 * x2)};
}

inline Col3 expp_col(double x, double tau) {
    const double e = std::exp(-x / tau) / tau;
    return {e, -e / tau, e / (tau * tau)};
}

inline Col3 inv_sq_col(double x) {
    const double x2 = x * x;
    return {1.0 / x2, -2.0 / (x2 * x), 6.0 / (x2 * x2)};
}

inline double det2(const Col3& u, const Col3& w) { return u.v * w.d - u.d * w.v; }

inline double det3(const Col3& u, const Col3& w, const Col3& z) {
    return u.v * (w.d * z.dd - w.dd * z.d) - w.v * (u.d * z.dd - u.dd * z.d) +
           z.v * (u.d * w.dd - u.dd * w.d);
}

}  // namespace termshape::basis
