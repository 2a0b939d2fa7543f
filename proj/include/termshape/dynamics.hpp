#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <thread>
#include <utility>
#include <vector>

#include "termshape/envelope.hpp"
#include "termshape/numerics.hpp"
#include "termshape/segmentation.hpp"
#include "termshape/shape_scan.hpp"

namespace termshape {

/// Initial state of the arbitrage-free dynamic model. Consistency forces
/// tau2 = tau1/2 (so it is not a field) and requires beta3 > 0.
class DynamicsInitial {
public:
    DynamicsInitial(double beta0, double beta1, double beta2, double beta3, double tau1)
        : beta0_(beta0), beta1_(beta1), beta2_(beta2), beta3_(beta3), tau1_(tau1) {
        if (!std::isfinite(beta0) || !std::isfinite(beta1) || !std::isfinite(beta2) ||
            !std::isfinite(beta3) || !std::isfinite(tau1))
            throw ValidationError("DynamicsInitial: all fields must be finite");
        if (!(beta3 > 0))
            throw ConsistencyError("DynamicsInitial: beta3 must be greater than 0");
        if (!(tau1 > 0)) throw ValidationError("DynamicsInitial: tau1 must be positive");
    }

    double beta0() const { return beta0_; }
    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double beta3() const { return beta3_; }
    double tau1() const { return tau1_; }
    double tau2() const { return tau1_ / 2.0; }

private:
    double beta0_, beta1_, beta2_, beta3_, tau1_;
};

/// Shape-loss horizons. Only the fields of the active branch (the sign of
/// beta2) are populated; beta2 == 0 leaves branch = 0 with all horizons zero.
struct Horizons {
    double t_dagger_f = 0;
    double t_dagger_y = 0;
    double t_star_f = 0;
    double t_star_star_y = 0;
    double t_star_y = 0;
    int branch = 0;
};

/// Shape probabilities at a fixed time.
struct ShapeDistribution {
    double t = 0;
    CurveKind kind = CurveKind::forward;
    std::map<ShapeTag, double> probs;

    double prob(ShapeTag tag) const {
        const auto it = probs.find(tag);
        return it == probs.end() ? 0.0 : it->second;
    }
};

namespace detail {

inline void check_time_representable(const DynamicsInitial& init, double t) {
    if (!std::isfinite(std::exp(t / init.tau1())) ||
        init.beta3() * std::exp(-2.0 * t / init.tau1()) == 0)
        throw ArgumentError("dynamics: time horizon exceeds the representable range");
}

}  // namespace detail

/// Deterministic part of the parameter flow and gamma1(t). beta1 is reported
/// along its mean path; beta0, tau1 stay fixed and tau2 is pinned at tau1/2.
inline std::pair<CurveParams, double> evolve_params(const DynamicsInitial& init, double t) {
    if (!(t >= 0) || !std::isfinite(t)) throw ArgumentError("evolve_params: t must be >= 0");
    detail::check_time_representable(init, t);
    const double tau1 = init.tau1();
    const double decay = std::exp(-t / tau1);
    const double beta2_t = init.beta2() * decay;
    const double beta3_t = init.beta3() * decay * decay;
    const double gamma1_t = init.beta2() / init.beta3() / decay;
    const double mu_t = std::exp(t / tau1) * (init.beta2() / (init.beta3() * tau1) * t +
                                              init.beta1() / init.beta3() + 2.0) -
                        2.0;
    return {CurveParams(init.beta0(), mu_t * beta3_t, beta2_t, beta3_t, tau1, tau1 / 2.0),
            gamma1_t};
}

/// Exact law of gamma2(t): mean and variance of the Gaussian solution.
inline std::pair<double, double> gamma2_law(const DynamicsInitial& init, double t) {
    if (!(t >= 0) || !std::isfinite(t)) throw ArgumentError("gamma2_law: t must be >= 0");
    const double tau1 = init.tau1();
    const double g = std::exp(t / tau1);
    const double mu = g * (init.beta2() / (init.beta3() * tau1) * t + init.beta1() / init.beta3() +
                           2.0) -
                      2.0;
    const double s2 = 2.0 * t * g * g / (init.beta3() * tau1 * tau1);
    return {mu, s2};
}

namespace detail {

/// Forward envelope ordinate for tau2 = tau1/2 (the dynamic model's regime).
inline double forward_envelope_ordinate(double tau1, double x) {
    return -4.0 / (tau1 * tau1) * std::exp(-x / tau1) *
           (x * x - 1.5 * tau1 * x + tau1 * tau1);
}

/// gamma1-coordinate of the yield cusp in the tau2 = tau1/2 model (a pure
/// number, independent of tau1).
inline Vec2 yield_cusp_point(double tau1) {
    const CurveParams ref(0, 0, 0, 1, tau1, tau1 / 2.0);
    const double xc = *cusp_abscissa(CurveKind::yield, ref);
    return envelope_point(CurveKind::yield, ref, xc);
}

/// Ordinates at which the vertical line gamma1 = g crosses the yield
/// envelope (tau2 = tau1/2). The upper branch covers g in (-6, cusp), the
/// lower branch g in (0, cusp).
inline std::vector<double> yield_envelope_crossings(double tau1, double g) {
    std::vector<double> out;
    const CurveParams ref(0, 0, 0, 1, tau1, tau1 / 2.0);
    const double xc = *cusp_abscissa(CurveKind::yield, ref);
    const auto cusp = envelope_point(CurveKind::yield, ref, xc);
    auto eta1 = [&](double x) { return envelope_point(CurveKind::yield, ref, x).x; };
    if (g > -6.0 && g < cusp.x) {
        const double lo = 1e-9 * tau1;
        const double root =
            brent_root([&](double x) { return eta1(x) - g; }, Bracket{lo, xc}, 1e-13 * tau1);
        out.push_back(envelope_point(CurveKind::yield, ref, root).y);
    }
    if (g > 0.0 && g < cusp.x) {
        // the lower branch decays like tau2/x, so the crossing escapes the
        // representable range for tiny g; the interval it would cut off
        // carries no measurable mass there
        double hi = 2.0 * xc;
        bool bracketed = false;
        while (hi <= 300.0 * tau1) {
            if (eta1(hi) <= g) {
                bracketed = true;
                break;
            }
            hi *= 1.7;
        }
        if (bracketed) {
            const double root =
                brent_root([&](double x) { return eta1(x) - g; }, Bracket{xc, hi}, 1e-13 * tau1);
            out.push_back(envelope_point(CurveKind::yield, ref, root).y);
        }
    }
    return out;
}

}  // namespace detail

/// Deterministic shape-loss horizons. The formulas carry an explicit tau1
/// factor, restored from equating gamma1(t) = (beta2/beta3) e^(t/tau1) to the
/// relevant envelope abscissas; they reduce to the published form at tau1=1.
inline Horizons horizons(const DynamicsInitial& init) {
    Horizons out;
    const double b2 = init.beta2(), b3 = init.beta3(), tau1 = init.tau1();
    if (b2 == 0) return out;
    if (b2 > 0) {
        out.branch = 1;
        out.t_dagger_f = tau1 * std::fmax(-2.5 + std::log(4.0 * b3 / b2), 0.0);
        const double cusp1 = detail::yield_cusp_point(tau1).x;
        out.t_dagger_y = tau1 * std::fmax(std::log(cusp1 * b3 / b2), 0.0);
        return out;
    }
    out.branch = -1;
    const double ab2 = -b2;
    out.t_star_f = tau1 * std::fmax(std::log(6.0 * b3 / ab2), 0.0);
    out.t_star_star_y = tau1 * std::fmax(std::log(5.0 * b3 / (4.0 * ab2)), 0.0);
    out.t_star_y = tau1 * std::fmax(std::log(6.0 * b3 / ab2), 0.0);
    return out;
}

/// Exact risk-neutral shape probabilities at time t.
///
/// The gamma plane is cut along the vertical gamma1 = gamma1(t) by l_0, l_inf
/// (yield) and the envelope; the forward-curve envelope ordinates come from
/// the two real Lambert W branches, the yield ones from root-finding on the
/// envelope's first coordinate. Every open interval between consecutive
/// thresholds carries one shape, identified by the direct classifier at its
/// midpoint, and receives Gaussian mass from the exact law of gamma2(t).
inline ShapeDistribution shape_probabilities(CurveKind kind, const DynamicsInitial& init,
                                             double t) {
    if (!(t > 0) || !std::isfinite(t)) throw ArgumentError("shape_probabilities: t must be > 0");
    detail::check_time_representable(init, t);
    const double tau1 = init.tau1();
    const double g1t = init.beta2() / init.beta3() * std::exp(t / tau1);
    const auto [mu, s2] = gamma2_law(init, t);
    const double sigma = std::sqrt(s2);

    std::vector<double> cuts;
    cuts.push_back(2.0 + g1t);  // l_0
    if (kind == CurveKind::yield) cuts.push_back(-g1t - 0.5);  // l_inf
    if (kind == CurveKind::forward) {
        if (init.beta2() == 0) {
            cuts.push_back(detail::forward_envelope_ordinate(tau1, 1.5 * tau1));
            cuts.push_back(0.0);  // limit of the envelope ordinate at x -> inf
        } else {
            const double warg =
                -init.beta2() / (4.0 * init.beta3()) * std::exp(t / tau1 + 1.5);
            if (init.beta2() > 0) {
                if (warg >= -std::exp(-1.0)) {
                    const double x0 = tau1 * (1.5 - lambert_w(WBranch::principal, warg));
                    const double xm1 = tau1 * (1.5 - lambert_w(WBranch::minus_one, warg));
                    cuts.push_back(detail::forward_envelope_ordinate(tau1, x0));
                    cuts.push_back(detail::forward_envelope_ordinate(tau1, xm1));
                }
            } else {
                const double x0 = tau1 * (1.5 - lambert_w(WBranch::principal, warg));
                if (x0 > 0) cuts.push_back(detail::forward_envelope_ordinate(tau1, x0));
            }
        }
    } else {
        for (double v : detail::yield_envelope_crossings(tau1, g1t)) cuts.push_back(v);
    }

    std::sort(cuts.begin(), cuts.end(), std::greater<>());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)); }),
               cuts.end());

    const double decay = std::exp(-t / tau1);
    const double beta2_t = init.beta2() * decay;
    const double beta3_t = init.beta3() * decay * decay;
    auto label = [&](double gamma2) {
        const CurveParams p(init.beta0(), gamma2 * beta3_t, beta2_t, beta3_t, tau1, tau1 / 2.0);
        return classify_direct(kind, p).tag;
    };
    auto cdf = [&](double v) { return normal_cdf((v - mu) / sigma); };

    ShapeDistribution dist;
    dist.t = t;
    dist.kind = kind;
    for (std::size_t i = 0; i <= cuts.size(); ++i) {
        const double upper = i == 0 ? std::numeric_limits<double>::infinity() : cuts[i - 1];
        const double lower = i == cuts.size() ? -std::numeric_limits<double>::infinity() : cuts[i];
        const double mid = i == 0
                               ? cuts.front() + 1.0 + std::fabs(cuts.front())
                               : (i == cuts.size() ? cuts.back() - 1.0 - std::fabs(cuts.back())
                                                   : 0.5 * (upper + lower));
        const double mass = (std::isinf(upper) ? 1.0 : cdf(upper)) -
                            (std::isinf(lower) ? 0.0 : cdf(lower));
        const double p = mass < 1e-300 ? 0.0 : mass;
        dist.probs[label(mid)] += p;
    }
    return dist;
}

/// Empirical shape distribution from n exact draws of gamma2(t); the law is
/// Gaussian, so there is no discretization error. Deterministic per seed;
/// classification of the draws may be spread over `threads` workers without
/// changing the result.
inline ShapeDistribution sample_shapes(CurveKind kind, const DynamicsInitial& init, double t,
                                       std::size_t n, std::uint64_t seed, unsigned threads = 1) {
    if (!(t >= 0) || !std::isfinite(t)) throw ArgumentError("sample_shapes: t must be >= 0");
    detail::check_time_representable(init, t);
    const double tau1 = init.tau1();
    const auto [mu, s2] = gamma2_law(init, t);
    const auto draws = gaussian_samples(mu, std::sqrt(s2), n, seed);

    const double decay = std::exp(-t / tau1);
    const double beta3_t = init.beta3() * decay * decay;
    const double g1t = init.beta2() / init.beta3() / decay;

    double max_norm = 0;
    for (double d : draws) max_norm = std::fmax(max_norm, std::hypot(g1t, d));
    const double horizon = 20.0 * tau1 * (1.0 + std::log1p(max_norm));
    const ScanBasis basis(kind, tau1, tau1 / 2.0, horizon);

    std::vector<ShapeTag> tags(n);
    const unsigned nw = std::max(1u, threads);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            tags[i] = basis.classify(beta3_t, g1t, draws[i]).tag;
    };
    if (nw == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + nw - 1) / nw;
        for (unsigned w = 0; w < nw; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    ShapeDistribution dist;
    dist.t = t;
    dist.kind = kind;
    for (auto tag : tags) dist.probs[tag] += 1.0;
    for (auto& [tag, v] : dist.probs) v /= static_cast<double>(n);
    return dist;
}

/// Almost-sure long-run shape under the consistent dynamics.
inline ShapeTag long_run_shape(const DynamicsInitial& init) {
    if (init.beta2() > 0) return ShapeTag::i;
    if (init.beta2() < 0) return ShapeTag::n;
    throw DomainError("long_run_shape: undetermined for beta2 == 0");
}

}  // namespace termshape
