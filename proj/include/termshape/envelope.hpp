#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "termshape/basis.hpp"
#include "termshape/curve.hpp"
#include "termshape/numerics.hpp"

namespace termshape {

/// Point in the gamma plane.
struct Vec2 {
    double x = 0;
    double y = 0;
};

/// Oriented line a + b*gamma1 + c*gamma2 = 0. The positive half-space is
/// {eval > 0}, matching the half-spaces swept by the extremum lines.
struct LineCoeffs {
    double a = 0;
    double b = 0;
    double c = 0;

    double eval(Vec2 g) const { return a + b * g.x + c * g.y; }
    double scale(Vec2 g) const {
        return std::fabs(a) + std::fabs(b * g.x) + std::fabs(c * g.y);
    }
};

struct Wronskians {
    double bc;   // W(b, c)
    double ca;   // W(c, a)
    double ab;   // W(a, b)
    double abc;  // W(a, b, c)
};

/// Extremum-line coefficients at abscissa x (raw orientation).
inline LineCoeffs basis_abc(CurveKind kind, const CurveParams& p, double x) {
    const auto t = kind == CurveKind::forward ? basis::abc_forward(x, p.tau1(), p.tau2())
                                              : basis::abc_yield(x, p.tau1(), p.tau2());
    return {t.a, t.b, t.c};
}

/// First- and second-order Wronskians of the basis triple. The forward case
/// uses the closed forms (which carry no beta3 dependence); the yield case
/// forms determinants of the analytic derivatives.
inline Wronskians wronskians(CurveKind kind, const CurveParams& p, double x) {
    const double t1 = p.tau1(), t2 = p.tau2();
    if (kind == CurveKind::forward) {
        const double e1 = std::exp(-x / t1);
        const double e12 = std::exp(-x * (1.0 / t1 + 1.0 / t2));
        Wronskians w;
        w.bc = -e1 * e1 / (t1 * t1 * t1);
        w.ca = e12 / (t1 * t1 * t2 * t2) * ((2.0 * t1 - t2) - x / t2 * (t1 - t2));
        w.ab = (t1 - t2) / std::pow(t1 * t2, 3) * e12 * (2.0 * t1 * t2 - x * (t1 + t2) + x * x);
        w.abc = std::exp(-x * (2.0 / t1 + 1.0 / t2)) / (std::pow(t1, 5) * std::pow(t2, 3)) *
                (-std::pow(2.0 * t1 - t2, 2) + t1 * t1 + x / t2 * std::pow(t1 - t2, 2));
        return w;
    }
    if (x <= 6.0 * std::fmin(t1, t2)) {
        const auto v = basis::abc_yield(x, t1, t2);
        const auto d = basis::abc_yield_d(x, t1, t2);
        const auto dd = basis::abc_yield_dd(x, t1, t2);
        Wronskians w;
        w.bc = v.b * d.c - v.c * d.b;
        w.ca = v.c * d.a - v.a * d.c;
        w.ab = v.a * d.b - v.b * d.a;
        w.abc = v.a * (d.b * dd.c - d.c * dd.b) - v.b * (d.a * dd.c - d.c * dd.a) +
                v.c * (d.a * dd.b - d.b * dd.a);
        return w;
    }
    // Far tail: the shared algebraic -tau/x^2 parts of the yield basis cancel
    // catastrophically in raw determinants. Use the exact column reductions
    //   c = A1 - t1 v,  b = c + E1,  a = A2 - t2 v + E2
    // so every determinant mixes only exponential columns with v.
    const auto A1 = basis::exp_avg_col(x, t1);
    const auto A2 = basis::exp_avg_col(x, t2);
    const auto E1 = basis::expp_col(x, t1);
    const auto E2 = basis::expp_col(x, t2);
    const auto v = basis::inv_sq_col(x);
    using basis::det2;
    using basis::det3;
    Wronskians w;
    // W(b,c) = W(E1, c) = det2(E1, A1) - t1 det2(E1, v)
    w.bc = det2(E1, A1) - t1 * det2(E1, v);
    // W(c,a) = [P1 P2' - P2 P1'] + [P1 E2' - E2 P1']
    const double pp = det2(A1, A2) - t2 * det2(A1, v) - t1 * det2(v, A2);
    const double p1e2 = det2(A1, E2) - t1 * det2(v, E2);
    w.ca = pp + p1e2;
    // W(a,b) = -[P1 P2' - P2 P1'] + [P2 E1' - E1 P2'] - [P1 E2' - E2 P1'] + [E2 E1' - E1 E2']
    const double p2e1 = det2(A2, E1) - t2 * det2(v, E1);
    w.ab = -pp + p2e1 - p1e2 + det2(E2, E1);
    // W(a,b,c) = det[a, E1, c]
    w.abc = det3(A2, E1, A1) - t1 * det3(A2, E1, v) - t2 * det3(v, E1, A1) +
            det3(E2, E1, A1) - t1 * det3(E2, E1, v);
    return w;
}

/// Closed form of the yield second-order Wronskian, used as a cross-check of
/// the determinant route. Three misprints in the published expression are
/// corrected here: the x^2 coefficient of the first polynomial is
/// -(t1-t2)^2, its x coefficient carries 5 t1^2 t2 (not 3), and the second
/// polynomial carries an overall factor -t1.
inline double wabc_yield_closed(double t1, double t2, double x) {
    const double p2 = -std::pow(t1 - t2, 2) * x * x +
                      (-2.0 * std::pow(t1, 3) + 5.0 * t1 * t1 * t2 - 2.0 * t1 * t2 * t2 -
                       std::pow(t2, 3)) *
                          x +
                      t2 * (4.0 * std::pow(t1, 3) - 3.0 * t1 * t1 * t2 - std::pow(t2, 3));
    const double q2 = -t1 * ((t1 - t2) * x * x + (t2 * t2 + t1 * t2 - 2.0 * t1 * t1) * x +
                             t1 * t2 * (4.0 * t1 - 3.0 * t2));
    const double e1 = std::exp(-x / t1);
    const double e2 = std::exp(-x / t2);
    return e1 / (std::pow(x, 4) * std::pow(t1 * t2, 3)) *
           (e1 * e2 * p2 + e2 * q2 + e1 * std::pow(t2, 4));
}

/// Magnitude of the summands inside wabc_yield_closed; the bracket vanishes
/// to fourth order at x = 0, so comparisons against the closed form are only
/// meaningful relative to this scale.
inline double wabc_yield_closed_scale(double t1, double t2, double x) {
    auto amag = [x](double c2, double c1, double c0) {
        return std::fabs(c2) * x * x + std::fabs(c1) * x + std::fabs(c0);
    };
    const double p2 = amag(std::pow(t1 - t2, 2),
                           -2.0 * std::pow(t1, 3) + 5.0 * t1 * t1 * t2 - 2.0 * t1 * t2 * t2 -
                               std::pow(t2, 3),
                           t2 * (4.0 * std::pow(t1, 3) - 3.0 * t1 * t1 * t2 - std::pow(t2, 3)));
    const double q2 = t1 * amag(t1 - t2, t2 * t2 + t1 * t2 - 2.0 * t1 * t1,
                                t1 * t2 * (4.0 * t1 - 3.0 * t2));
    const double e1 = std::exp(-x / t1);
    const double e2 = std::exp(-x / t2);
    return e1 / (std::pow(x, 4) * std::pow(t1 * t2, 3)) *
           (e1 * e2 * p2 + e2 * q2 + e1 * std::pow(t2, 4));
}

/// Envelope point eta(x) = (W(c,a)/W(b,c), W(a,b)/W(b,c)).
inline Vec2 envelope_point(CurveKind kind, const CurveParams& p, double x) {
    const auto w = wronskians(kind, p, x);
    return {w.ca / w.bc, w.ab / w.bc};
}

/// Abscissa of the envelope cusp (the single transversal zero of W(a,b,c)),
/// absent in the weakly scale-inverted regime. In nearly-degenerate regimes
/// (r close to 1) the yield zero drifts beyond the range where the Wronskian
/// is representable; it is reported as absent there.
inline std::optional<double> cusp_abscissa(CurveKind kind, const CurveParams& p) {
    if (p.beta3() == 0) throw FamilyError("cusp_abscissa: beta3 == 0 has no gamma-plane envelope");
    const double t1 = p.tau1(), t2 = p.tau2();
    const double r = t1 / t2;
    if (r >= 1.0 / 3.0 && r < 1.0) return std::nullopt;
    const double xf = t2 * (3.0 * t1 - t2) / (t1 - t2);
    if (kind == CurveKind::forward) return xf;
    // yield cusp: bracket from the forward cusp (W_y is still negative there)
    auto f = [&](double x) { return wronskians(CurveKind::yield, p, x).abc; };
    double lo = xf, hi = xf;
    double flo = f(lo);
    if (flo == 0) return lo;
    if (flo > 0)
        throw InternalError("cusp_abscissa: yield Wronskian sign unexpected at forward cusp");
    for (int k = 0; k < 200; ++k) {
        hi = hi * 1.5 + 0.1 * t1;
        const double fhi = f(hi);
        if (fhi > 0) return brent_root(f, Bracket{lo, hi}, 1e-12 * (1.0 + hi));
        if (fhi == 0) return std::nullopt;  // underflowed before the sign flip
        lo = hi;
    }
    return std::nullopt;
}

/// Limiting lines, their intersection and the envelope contact points.
struct BoundaryLines {
    LineCoeffs line0;                       // common to both curve kinds
    std::optional<LineCoeffs> line_inf;     // scale-regular only
    std::optional<Vec2> m;                  // intersection of line0 and line_inf
    Vec2 contact0;
    std::optional<Vec2> contact_inf;
};

inline BoundaryLines boundary_lines(CurveKind kind, const CurveParams& p) {
    if (p.beta3() == 0) throw FamilyError("boundary_lines: beta3 == 0 has no gamma-plane envelope");
    const double t1 = p.tau1(), t2 = p.tau2();
    BoundaryLines out;
    out.line0 = {t1, t2, -t2};
    out.contact0 = {t1 / (t2 * t2) * (t2 - 2.0 * t1), 2.0 * t1 / (t2 * t2) * (t2 - t1)};
    if (t1 / t2 > 1.0) {
        if (kind == CurveKind::forward) {
            out.line_inf = LineCoeffs{0.0, -1.0, 0.0};  // gamma1 = 0, + side on the left
            out.m = Vec2{0.0, t1 / t2};
            out.contact_inf = Vec2{0.0, 0.0};
        } else {
            out.line_inf = LineCoeffs{-t2, -t1, -t1};
            out.m = Vec2{-(t1 * t1 + t2 * t2) / (2.0 * t1 * t2), (t1 * t1 - t2 * t2) / (2.0 * t1 * t2)};
            out.contact_inf = Vec2{0.0, -t2 / t1};
        }
    }
    return out;
}

/// Discretized envelope with its markers.
struct EnvelopeCurve {
    CurveKind kind;
    std::vector<std::pair<double, Vec2>> samples;      // strictly increasing in x
    std::optional<std::pair<double, Vec2>> cusp;
    LineCoeffs line0;
    std::optional<LineCoeffs> line_inf;                // l_omega: analytic or l_T
    Vec2 contact0;
    std::optional<Vec2> contact_inf;
    std::optional<Vec2> m;                             // basepoint of the augmented loop
    double horizon;                                    // inf for the scale-regular closure
};

/// Closed planar polyline; the first vertex is implicitly repeated at the end.
struct ClosedPolyline {
    std::vector<Vec2> vertices;
};

namespace detail {

inline Vec2 intersect_lines(const LineCoeffs& l1, const LineCoeffs& l2) {
    const double det = l1.b * l2.c - l1.c * l2.b;
    if (det == 0) throw InternalError("intersect_lines: parallel lines");
    return {(-l1.a * l2.c + l1.c * l2.a) / det, (-l1.b * l2.a + l1.a * l2.b) / det};
}

}  // namespace detail

/// Builds the sampled envelope over (0, horizon] together with the closure
/// data of the augmented loop. A horizon of +inf selects the scale-regular
/// closure through M; scale-inverted regimes require a finite horizon.
inline EnvelopeCurve build_envelope(CurveKind kind, const CurveParams& p, double horizon,
                                    std::size_t n = 1024) {
    if (n < 3) throw ArgumentError("build_envelope: need at least 3 samples");
    const auto bl = boundary_lines(kind, p);
    const double t1 = p.tau1(), t2 = p.tau2();
    const bool scale_regular = t1 / t2 > 1.0;
    const bool closure_at_infinity = std::isinf(horizon);
    if (closure_at_infinity && !scale_regular)
        throw ArgumentError("build_envelope: scale-inverted regimes need a finite horizon");

    EnvelopeCurve env;
    env.kind = kind;
    env.line0 = bl.line0;
    env.contact0 = bl.contact0;
    env.horizon = horizon;

    const double x_lo = 1e-6 * std::fmin(t1, t2);
    double x_hi = closure_at_infinity ? 45.0 * std::fmax(t1, t2) : horizon;
    if (!closure_at_infinity) {
        // the scale-inverted envelope escapes like e^(x (1/t1 - 1/t2)); keep
        // the loop inside the range where segment/winding arithmetic stays
        // exact. Truncating the monotone escape cannot change the winding
        // around any representable query point.
        for (int k = 0; k < 500; ++k) {
            const auto pt = envelope_point(kind, p, x_hi);
            if (std::isfinite(pt.x) && std::isfinite(pt.y) && std::fabs(pt.x) < 1e100 &&
                std::fabs(pt.y) < 1e100)
                break;
            x_hi *= 0.92;
        }
        if (x_hi <= x_lo) throw ArgumentError("build_envelope: horizon collapsed to zero");
    }

    std::vector<double> xs;
    xs.reserve(n + 80);
    const double lf = std::log(x_lo), hf = std::log(x_hi);
    for (std::size_t j = 0; j < n; ++j)
        xs.push_back(std::exp(lf + (hf - lf) * static_cast<double>(j) / static_cast<double>(n - 1)));
    xs.back() = x_hi;

    const auto cx = cusp_abscissa(kind, p);
    if (cx && *cx < x_hi) {
        for (int j = 0; j <= 64; ++j)
            xs.push_back(*cx * (0.9 + 0.2 * j / 64.0));
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        while (!xs.empty() && xs.back() > x_hi) xs.pop_back();
        if (xs.back() != x_hi) xs.push_back(x_hi);
    }

    env.samples.reserve(xs.size());
    for (double x : xs) env.samples.emplace_back(x, envelope_point(kind, p, x));
    if (cx) env.cusp = std::make_pair(*cx, envelope_point(kind, p, *cx));

    if (closure_at_infinity) {
        env.line_inf = bl.line_inf;
        env.contact_inf = bl.contact_inf;
        env.m = bl.m;
    } else {
        env.horizon = x_hi;
        env.line_inf = basis_abc(kind, p, x_hi);
        env.contact_inf = env.samples.back().second;
        env.m = detail::intersect_lines(env.line0, *env.line_inf);
    }
    return env;
}

/// Oriented closed loop: M -> contact at l_0 -> envelope -> contact at
/// l_omega -> M.
inline ClosedPolyline augmented_envelope(CurveKind kind, const CurveParams& p, double horizon,
                                         std::size_t n = 1024) {
    const auto env = build_envelope(kind, p, horizon, n);
    ClosedPolyline poly;
    poly.vertices.reserve(env.samples.size() + 3);
    poly.vertices.push_back(*env.m);
    poly.vertices.push_back(env.contact0);
    for (const auto& [x, pt] : env.samples) poly.vertices.push_back(pt);
    if (env.contact_inf) poly.vertices.push_back(*env.contact_inf);
    return poly;
}

}  // namespace termshape
