#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "termshape/basis.hpp"
#include "termshape/curve.hpp"
#include "termshape/numerics.hpp"
#include "termshape/shape.hpp"

namespace termshape {

struct ScanPolicy {
    std::size_t grid_points = 10'000;
    double sign_rel_tol = 1e-9;  // sign decisions closer to zero are ambiguous
    double root_tol = 1e-12;
};

inline std::size_t family_extrema_cap(Family f) {
    switch (f) {
        case Family::nelson_siegel: return 1;
        case Family::bliss: return 2;
        default: return 3;
    }
}

namespace detail {

/// Derivative value together with the sum of its term magnitudes; the latter
/// is the local scale against which sign decisions are tolerated.
inline std::pair<double, double> derivative_with_scale(CurveKind kind, const CurveParams& p,
                                                       double x) {
    if (kind == CurveKind::forward) {
        const double t1 = (p.beta2() - p.beta1()) * basis::f1(x, p.tau1());
        const double t2 = -p.beta2() * basis::f2(x, p.tau1());
        const double t3 = p.beta3() * basis::f3(x, p.tau2());
        const double t4 = -p.beta3() * basis::f4(x, p.tau2());
        return {t1 + t2 + t3 + t4,
                std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + std::fabs(t4)};
    }
    const auto t = basis::abc_yield(x, p.tau1(), p.tau2());
    const double t1 = p.beta1() * t.c;
    const double t2 = p.beta2() * t.b;
    const double t3 = p.beta3() * t.a;
    return {t1 + t2 + t3, std::fabs(t1) + std::fabs(t2) + std::fabs(t3)};
}

/// Geometric grid on [lo, hi].
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    const double lf = std::log(lo), hf = std::log(hi);
    for (std::size_t j = 0; j < n; ++j)
        xs[j] = std::exp(lf + (hf - lf) * static_cast<double>(j) / static_cast<double>(n - 1));
    xs.front() = lo;
    xs.back() = hi;
    return xs;
}

/// Shared sign-sequence classifier. `eval` must return (value, scale) of the
/// derivative at an arbitrary abscissa. Transversal zeros are refined with
/// Brent; near-tangential dips are re-scanned locally; a terminal-sign
/// mismatch at the horizon triggers a bracket hunt beyond it.
class SignScanner {
public:
    SignScanner(std::function<std::pair<double, double>(double)> eval, const ScanPolicy& policy)
        : eval_(std::move(eval)), policy_(policy) {}

    Shape run(const std::vector<double>& xs, const std::vector<double>& vals,
              const std::vector<double>& scales, double v0, double scale0, SlopeSign s_term,
              std::size_t cap, double tail_hint = std::numeric_limits<double>::quiet_NaN()) const {
        const double tol = policy_.sign_rel_tol;
        auto decide = [tol](double v, double s) -> int {
            if (std::fabs(v) > tol * s) return v > 0 ? 1 : -1;
            return 0;
        };

        std::vector<double> roots;
        int prev_sign = 0;
        double prev_x = 0;
        std::size_t prev_idx = 0;
        bool have_prev = false;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const int sj = decide(vals[j], scales[j]);
            if (sj == 0) continue;
            if (have_prev && sj != prev_sign) {
                roots.push_back(refine(prev_x, xs[j]));
            } else if (have_prev && j > prev_idx + 1) {
                // same sign with an undecided run between: possible tangency
                scan_subcell(xs[prev_idx], xs[j], roots);
            }
            prev_sign = sj;
            prev_x = xs[j];
            prev_idx = j;
            have_prev = true;
        }
        // near-tangential dips of |v|/scale that never reach the tolerance band
        refine_shallow_dips(xs, vals, scales, roots);
        std::sort(roots.begin(), roots.end());
        // the local rescans can rediscover roots already found
        roots.erase(std::unique(roots.begin(), roots.end(),
                                [](double r1, double r2) {
                                    return std::fabs(r2 - r1) <= 1e-9 * (1.0 + std::fabs(r2));
                                }),
                    roots.end());

        int s_init = decide(v0, scale0);
        const int s_first = [&] {
            for (std::size_t j = 0; j < xs.size(); ++j) {
                const int sj = decide(vals[j], scales[j]);
                if (sj != 0) return sj;
            }
            return 0;
        }();
        if (s_init == 0) s_init = s_first;
        if (s_init == 0 && roots.empty() && prev_sign == 0) return Shape{ShapeTag::flat, {}};
        if (s_init != 0 && s_first != 0 && s_init != s_first && !xs.empty()) {
            // root squeezed between 0+ and the first grid node
            const double lo = xs.front() * 1e-9;
            const auto [vlo, slo] = eval_(lo);
            if (decide(vlo, slo) == s_init) roots.insert(roots.begin(), refine(lo, xs.front()));
            else s_init = s_first;
        }

        // tail: the analytic terminal sign rules beyond the horizon
        int s_last = prev_sign != 0 ? prev_sign : s_init;
        if (s_term != SlopeSign::zero && s_last != 0 && s_last != static_cast<int>(s_term)) {
            double lo = prev_sign != 0 ? prev_x : xs.back();
            double hi = xs.back();
            bool appended = false;
            for (int k = 0; k < 48 && !appended; ++k) {
                hi *= 2.0;
                const auto [v, s] = eval_(hi);
                if (s == 0) break;  // exponentials dead: evaluation cannot decide out here
                const int sh = decide(v, s);
                if (sh == static_cast<int>(s_term)) {
                    roots.push_back(refine(lo, hi));
                    appended = true;
                } else if (sh == s_last) {
                    lo = hi;
                }
            }
            // fall back to the analytic root of the dominant affine factor
            if (!appended && std::isfinite(tail_hint) && tail_hint > lo)
                roots.push_back(tail_hint);
        }

        if (roots.size() > cap)
            throw InternalError("classify: refined root count exceeds the family cap");

        Shape shape;
        shape.tag = shape_tag_from(s_init > 0 ? SlopeSign::positive
                                              : (s_init < 0 ? SlopeSign::negative : SlopeSign::zero),
                                   roots.size());
        int sgn = s_init;
        for (double r : roots) {
            shape.extrema.push_back({r, sgn > 0 ? ExtremumKind::hump : ExtremumKind::dip});
            sgn = -sgn;
        }
        return shape;
    }

private:
    double refine(double lo, double hi) const {
        auto f = [this](double x) { return eval_(x).first; };
        const double vl = f(lo), vh = f(hi);
        if (vl == 0) return lo;
        if (vh == 0) return hi;
        if ((vl > 0) == (vh > 0)) return 0.5 * (lo + hi);  // tolerance-band artifact
        return brent_root(f, Bracket{lo, hi}, policy_.root_tol * (1.0 + hi));
    }

    void refine_shallow_dips(const std::vector<double>& xs, const std::vector<double>& vals,
                             const std::vector<double>& scales,
                             std::vector<double>& roots) const {
        // local minima of |v|/scale below 1e-5 between same-sign neighbours can
        // hide a transversal pair inside one cell
        for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
            const double rj = std::fabs(vals[j]) / std::fmax(scales[j], 1e-300);
            const double rl = std::fabs(vals[j - 1]) / std::fmax(scales[j - 1], 1e-300);
            const double rr = std::fabs(vals[j + 1]) / std::fmax(scales[j + 1], 1e-300);
            if (rj > 1e-5 || rj > rl || rj > rr) continue;
            // only dips between decided neighbours can hide a real pair;
            // noise plateaus (e.g. exactly on a limiting line) must not fire
            if (rl <= policy_.sign_rel_tol || rr <= policy_.sign_rel_tol) continue;
            const int sl = vals[j - 1] > 0 ? 1 : -1;
            const int sr = vals[j + 1] > 0 ? 1 : -1;
            const int sj = vals[j] > 0 ? 1 : -1;
            if (sl != sr || sj != sl) continue;  // already handled as sign change
            scan_subcell(xs[j - 1], xs[j + 1], roots);
        }
    }

    void scan_subcell(double lo, double hi, std::vector<double>& roots) const {
        constexpr int kSub = 128;
        double prev_x = lo;
        int prev_s = 0;
        for (int k = 0; k <= kSub; ++k) {
            const double x = lo + (hi - lo) * k / kSub;
            const auto [v, s] = eval_(x);
            if (std::fabs(v) <= policy_.sign_rel_tol * s) continue;
            const int sx = v > 0 ? 1 : -1;
            if (prev_s != 0 && sx != prev_s) roots.push_back(refine(prev_x, x));
            prev_x = x;
            prev_s = sx;
        }
    }

    std::function<std::pair<double, double>(double)> eval_;
    ScanPolicy policy_;
};

/// Analytic zero of the dominant affine factor of the forward derivative,
/// used when a sign change is known to lie beyond the range where the
/// exponentials are representable. NaN when no such zero exists.
inline double tail_root_hint(CurveKind kind, const CurveParams& p) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (kind != CurveKind::forward) return nan;
    double lin, cst;
    if (p.beta3() == 0 || p.tau1() > p.tau2()) {
        cst = (p.beta2() - p.beta1()) / p.tau1();
        lin = -p.beta2() / (p.tau1() * p.tau1());
    } else {
        cst = p.beta3() / p.tau2();
        lin = -p.beta3() / (p.tau2() * p.tau2());
    }
    if (lin == 0) return nan;
    const double x = -cst / lin;
    return x > 0 ? x : nan;
}

inline double scan_horizon(const CurveParams& p) {
    if (p.beta3() != 0) {
        const auto g = to_gamma(p);
        return 20.0 * std::fmax(p.tau1(), p.tau2()) *
               (1.0 + std::log1p(std::hypot(g.gamma1, g.gamma2)));
    }
    const double ratio = p.beta2() != 0 ? std::fabs(p.beta1() / p.beta2()) : 0.0;
    return 20.0 * p.tau1() * (1.0 + std::log1p(ratio));
}

}  // namespace detail

/// Direct shape classification: locate all transversal zeros of the curve
/// derivative on a geometric scan grid, refine them with Brent, and read the
/// tag off the sign sequence. The family cap of 1/2/3 extrema is enforced.
inline Shape classify_direct(CurveKind kind, const CurveParams& p, const ScanPolicy& policy = {}) {
    if (p.beta1() == 0 && p.beta2() == 0 && p.beta3() == 0) return Shape{ShapeTag::flat, {}};

    const double horizon = detail::scan_horizon(p);
    const double x_lo = 1e-6 * std::fmin(p.tau1(), p.tau2());
    const auto xs = detail::geometric_grid(x_lo, horizon, policy.grid_points);
    std::vector<double> vals(xs.size()), scales(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const auto [v, s] = detail::derivative_with_scale(kind, p, xs[j]);
        vals[j] = v;
        scales[j] = s;
    }
    detail::SignScanner scanner(
        [kind, &p](double x) { return detail::derivative_with_scale(kind, p, x); }, policy);
    return scanner.run(xs, vals, scales, initial_slope_value(kind, p), initial_slope_scale(p),
                       terminal_slope_sign(kind, p), family_extrema_cap(p.family()),
                       detail::tail_root_hint(kind, p));
}

/// Sign of the curve slope at x = 0+ (identical for forward and yield).
inline SlopeSign initial_slope_sign(CurveKind kind, const CurveParams& p) {
    const double v = initial_slope_value(kind, p);
    const double s = initial_slope_scale(p);
    if (std::fabs(v) <= 1e-12 * s) return SlopeSign::zero;
    return v > 0 ? SlopeSign::positive : SlopeSign::negative;
}

/// Precomputed extremum-line basis over a scan grid, for repeated
/// classification with the time scales held fixed. Only beta3 != 0 families.
class ScanBasis {
public:
    ScanBasis(CurveKind kind, double tau1, double tau2, double horizon,
              const ScanPolicy& policy = {})
        : kind_(kind), tau1_(tau1), tau2_(tau2), policy_(policy) {
        const double x_lo = 1e-6 * std::fmin(tau1, tau2);
        xs_ = detail::geometric_grid(x_lo, horizon, policy.grid_points);
        a_.resize(xs_.size());
        b_.resize(xs_.size());
        c_.resize(xs_.size());
        for (std::size_t j = 0; j < xs_.size(); ++j) {
            const auto t = kind == CurveKind::forward ? basis::abc_forward(xs_[j], tau1, tau2)
                                                      : basis::abc_yield(xs_[j], tau1, tau2);
            a_[j] = t.a;
            b_[j] = t.b;
            c_[j] = t.c;
        }
    }

    double horizon() const { return xs_.back(); }

    Shape classify(double beta3, double gamma1, double gamma2) const {
        const CurveParams p(0.0, gamma2 * beta3, gamma1 * beta3, beta3, tau1_, tau2_);
        std::vector<double> vals(xs_.size()), scales(xs_.size());
        for (std::size_t j = 0; j < xs_.size(); ++j) {
            const double ta = beta3 * a_[j];
            const double tb = beta3 * gamma1 * b_[j];
            const double tc = beta3 * gamma2 * c_[j];
            vals[j] = ta + tb + tc;
            scales[j] = std::fabs(ta) + std::fabs(tb) + std::fabs(tc);
        }
        detail::SignScanner scanner(
            [this, &p](double x) { return detail::derivative_with_scale(kind_, p, x); }, policy_);
        return scanner.run(xs_, vals, scales, initial_slope_value(kind_, p),
                           initial_slope_scale(p), terminal_slope_sign(kind_, p),
                           family_extrema_cap(p.family()), detail::tail_root_hint(kind_, p));
    }

private:
    CurveKind kind_;
    double tau1_, tau2_;
    ScanPolicy policy_;
    std::vector<double> xs_, a_, b_, c_;
};

}  // namespace termshape
