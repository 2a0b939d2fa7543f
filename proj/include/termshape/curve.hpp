#pragma once

#include <cmath>
#include <string>

#include "termshape/basis.hpp"
#include "termshape/errors.hpp"

namespace termshape {

enum class CurveKind { forward, yield };

enum class Family { nelson_siegel, bliss, svensson };

enum class RegimeTag { scale_regular, weakly_scale_inverted, strongly_scale_inverted };

/// r = tau1/tau2 together with its classification.
struct Regime {
    RegimeTag tag;
    double r;
};

enum class Polarity { positive, negative };

/// Reduced coordinates (beta2/beta3, beta1/beta3); defined only for beta3 != 0.
struct GammaPoint {
    double gamma1;
    double gamma2;
    Polarity beta3_sign;
};

enum class SlopeSign { negative = -1, zero = 0, positive = 1 };

/// Full Svensson parameter vector. Validated once at construction; all
/// evaluation routines assume a valid object.
class CurveParams {
public:
    CurveParams(double beta0, double beta1, double beta2, double beta3, double tau1,
                double tau2)
        : beta0_(beta0), beta1_(beta1), beta2_(beta2), beta3_(beta3), tau1_(tau1), tau2_(tau2) {
        if (!std::isfinite(beta0) || !std::isfinite(beta1) || !std::isfinite(beta2) ||
            !std::isfinite(beta3) || !std::isfinite(tau1) || !std::isfinite(tau2))
            throw ValidationError("CurveParams: all fields must be finite");
        if (!(tau1 > 0) || !(tau2 > 0))
            throw ValidationError("CurveParams: tau1 and tau2 must be positive");
        if (beta3 != 0 && tau1 == tau2)
            throw DegenerateFamilyError("CurveParams: tau1 == tau2 with beta3 != 0");
    }

    double beta0() const { return beta0_; }
    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double beta3() const { return beta3_; }
    double tau1() const { return tau1_; }
    double tau2() const { return tau2_; }

    Family family() const {
        if (beta3_ == 0) return Family::nelson_siegel;
        if (beta2_ == 0) return Family::bliss;
        return Family::svensson;
    }

private:
    double beta0_, beta1_, beta2_, beta3_, tau1_, tau2_;
};

/// Instantaneous forward rate phi(x).
inline double forward_rate(const CurveParams& p, double x) {
    if (!(x >= 0) || !std::isfinite(x)) throw ArgumentError("forward_rate: x must be finite and >= 0");
    const double e1 = std::exp(-x / p.tau1());
    const double e2 = std::exp(-x / p.tau2());
    return p.beta0() + p.beta1() * e1 + p.beta2() / p.tau1() * x * e1 +
           p.beta3() / p.tau2() * x * e2;
}

namespace detail {
// (1 - e^-u)/u without cancellation; equals 1 at u = 0.
inline double one_minus_exp_over(double u) {
    if (u == 0) return 1.0;
    return -std::expm1(-u) / u;
}
}  // namespace detail

/// Yield (running average of the forward curve); continuous extension at 0.
inline double yield_rate(const CurveParams& p, double x) {
    if (!(x >= 0) || !std::isfinite(x)) throw ArgumentError("yield_rate: x must be finite and >= 0");
    const double g1 = detail::one_minus_exp_over(x / p.tau1());
    const double g2 = detail::one_minus_exp_over(x / p.tau2());
    const double e1 = std::exp(-x / p.tau1());
    const double e2 = std::exp(-x / p.tau2());
    return p.beta0() + p.beta1() * g1 + p.beta2() * (g1 - e1) + p.beta3() * (g2 - e2);
}

/// d/dx of the forward or yield curve. The yield branch evaluates the
/// averaged basis functions, which are series-continued near x = 0.
inline double curve_derivative(CurveKind kind, const CurveParams& p, double x) {
    if (!(x >= 0) || !std::isfinite(x))
        throw ArgumentError("curve_derivative: x must be finite and >= 0");
    if (kind == CurveKind::forward) {
        return (p.beta2() - p.beta1()) * basis::f1(x, p.tau1()) -
               p.beta2() * basis::f2(x, p.tau1()) + p.beta3() * basis::f3(x, p.tau2()) -
               p.beta3() * basis::f4(x, p.tau2());
    }
    const auto t = basis::abc_yield(x, p.tau1(), p.tau2());
    return p.beta1() * t.c + p.beta2() * t.b + p.beta3() * t.a;
}

/// gamma = (beta2/beta3, beta1/beta3) with the sign of beta3.
inline GammaPoint to_gamma(const CurveParams& p) {
    if (p.beta3() == 0)
        throw FamilyError("to_gamma: beta3 == 0 (Nelson-Siegel has no gamma coordinates)");
    return {p.beta2() / p.beta3(), p.beta1() / p.beta3(),
            p.beta3() > 0 ? Polarity::positive : Polarity::negative};
}

/// Classifies r = tau1/tau2. Boundaries: r = 1/3 is weakly scale-inverted,
/// r = 1 is degenerate.
inline Regime regime_of(const CurveParams& p) {
    const double r = p.tau1() / p.tau2();
    if (r == 1.0) throw DegenerateFamilyError("regime_of: tau1 == tau2");
    if (r > 1.0) return {RegimeTag::scale_regular, r};
    if (r >= 1.0 / 3.0) return {RegimeTag::weakly_scale_inverted, r};
    return {RegimeTag::strongly_scale_inverted, r};
}

/// Slope of the curve at x = 0+: (beta2 - beta1)/tau1 + beta3/tau2 for the
/// forward curve; the yield value is exactly half of it, hence shares its sign.
inline double initial_slope_value(CurveKind kind, const CurveParams& p) {
    const double v = (p.beta2() - p.beta1()) / p.tau1() + p.beta3() / p.tau2();
    return kind == CurveKind::forward ? v : 0.5 * v;
}

/// Magnitude scale matching initial_slope_value, for sign tolerance decisions.
inline double initial_slope_scale(const CurveParams& p) {
    return (std::fabs(p.beta2()) + std::fabs(p.beta1())) / p.tau1() +
           std::fabs(p.beta3()) / p.tau2();
}

/// Sign of the derivative as x -> infinity, decided by the slowest-decaying
/// term. Pairs (linear, constant) coefficients per time scale; the linear
/// coefficient wins whenever it is visible within the representable range.
inline SlopeSign terminal_slope_sign(CurveKind kind, const CurveParams& p) {
    const double t1 = p.tau1(), t2 = p.tau2();
    auto sign_of = [](double v) {
        return v > 0 ? SlopeSign::positive : (v < 0 ? SlopeSign::negative : SlopeSign::zero);
    };
    if (kind == CurveKind::forward) {
        // scale tau1 carries (beta2 - beta1)/tau1 - beta2 x/tau1^2,
        // scale tau2 carries  beta3/tau2 - beta3 x/tau2^2; within each scale
        // the linear coefficient wins eventually.
        auto pair_sign = [&](double lin, double cst) {
            return lin != 0 ? sign_of(lin) : sign_of(cst);
        };
        const SlopeSign s1 = pair_sign(-p.beta2() / (t1 * t1), (p.beta2() - p.beta1()) / t1);
        const SlopeSign s2 = pair_sign(-p.beta3() / (t2 * t2), p.beta3() / t2);
        if (p.beta3() == 0 || t1 > t2) return s1 != SlopeSign::zero ? s1 : s2;
        if (t2 > t1) return s2 != SlopeSign::zero ? s2 : s1;
        return s1 != SlopeSign::zero ? s1 : s2;  // t1 == t2 only with beta3 == 0
    }
    // Yield basis functions decay algebraically: the leading term is
    // -(beta1 tau1 + beta2 tau1 + beta3 tau2)/x^2; exponential corrections
    // decide only on that line.
    const double lead = p.beta1() * t1 + p.beta2() * t1 + p.beta3() * t2;
    if (lead != 0) return sign_of(-lead);
    if (p.beta3() == 0 || t1 > t2) {
        if (p.beta2() != 0) return sign_of(p.beta2());
        if (p.beta1() != 0) return sign_of(p.beta1());
        return sign_of(p.beta3());
    }
    return sign_of(p.beta3());
}

inline const char* to_string(CurveKind k) {
    return k == CurveKind::forward ? "forward" : "yield";
}

inline const char* to_string(Family f) {
    switch (f) {
        case Family::nelson_siegel: return "nelson-siegel";
        case Family::bliss: return "bliss";
        default: return "svensson";
    }
}

inline const char* to_string(RegimeTag t) {
    switch (t) {
        case RegimeTag::scale_regular: return "sr";
        case RegimeTag::weakly_scale_inverted: return "wsi";
        default: return "ssi";
    }
}

}  // namespace termshape
