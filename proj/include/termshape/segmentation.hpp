#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "termshape/envelope.hpp"
#include "termshape/shape.hpp"
#include "termshape/shape_scan.hpp"

namespace termshape {

/// Quadrant naming of the half-space intersections of l_0 and l_omega. The
/// mnemonics track the monotone/single-extremum shapes the quadrants carry;
/// flipping the sign of beta3 relabels them.
enum class QuadrantTag { qn, qi, qh, qd };

inline const char* to_string(QuadrantTag q) {
    switch (q) {
        case QuadrantTag::qn: return "Qn";
        case QuadrantTag::qi: return "Qi";
        case QuadrantTag::qh: return "Qh";
        default: return "Qd";
    }
}

struct QuadrantLabel {
    QuadrantTag tag;
    int l0_sign;      // raw half-space sign at l_0
    int lomega_sign;  // raw half-space sign at l_omega (l_inf or l_T)
};

inline QuadrantLabel quadrant_label(int l0_sign, int lomega_sign, Polarity beta3_sign) {
    if (l0_sign == 0 || lomega_sign == 0)
        throw ArgumentError("quadrant_label: signs must be nonzero");
    const int s = beta3_sign == Polarity::positive ? 1 : -1;
    QuadrantTag tag;
    if (l0_sign == s)
        tag = lomega_sign == s ? QuadrantTag::qn : QuadrantTag::qh;
    else
        tag = lomega_sign == s ? QuadrantTag::qd : QuadrantTag::qi;
    return {tag, l0_sign, lomega_sign};
}

/// One classified gamma-plane point.
struct SegmentRecord {
    double gamma1 = 0;
    double gamma2 = 0;
    ShapeTag shape = ShapeTag::flat;
    int winding = 0;
    bool in_d = false;
    bool boundary_flag = false;
};

/// Signed winding number of a closed polyline around a point, via summed
/// signed angles. `residual` (if given) receives the distance of the raw
/// angle sum to the nearest integer multiple of 2 pi.
inline int winding_number(const ClosedPolyline& poly, Vec2 g, double* residual = nullptr) {
    const auto& v = poly.vertices;
    if (v.size() < 3) throw ArgumentError("winding_number: degenerate polyline");
    double angle = 0;
    double px = v.back().x - g.x, py = v.back().y - g.y;
    for (const auto& q : v) {
        const double qx = q.x - g.x, qy = q.y - g.y;
        const double cross = px * qy - py * qx;
        const double dot = px * qx + py * qy;
        if (cross != 0 || dot != 0) angle += std::atan2(cross, dot);
        px = qx;
        py = qy;
    }
    if (!std::isfinite(angle))
        throw NumericalError("winding_number: non-finite angle sum (vertex overflow)");
    const double turns = angle / (2.0 * M_PI);
    const double rounded = std::nearbyint(turns);
    if (residual) *residual = std::fabs(turns - rounded);
    return static_cast<int>(rounded);
}

namespace detail {

inline double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy);
}

/// Distance to the closed polyline plus the index of the nearest edge.
///
/// Scale-inverted loops carry vertices at astronomically large coordinates
/// (the envelope escape and l_T closure); naive point-segment arithmetic
/// there loses every digit. Edges with both endpoints farther than R from
/// the query cannot come near it (consecutive envelope steps are small
/// relative to their magnitude), so they are skipped, and a single far
/// endpoint is pulled to distance R along the edge before measuring.
inline std::pair<double, std::size_t> dist_to_polyline(const ClosedPolyline& poly, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    const auto& v = poly.vertices;
    const double far = 1e3 * (1.0 + std::hypot(p.x, p.y));
    auto is_far = [&](Vec2 q) {
        return std::fabs(q.x - p.x) > far || std::fabs(q.y - p.y) > far;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        const bool fa = is_far(a), fb = is_far(b);
        if (fa && fb) continue;
        if (fa) {
            const double len = std::hypot(a.x - b.x, a.y - b.y);
            const double s = far / len;
            a = {b.x + (a.x - b.x) * s, b.y + (a.y - b.y) * s};
        } else if (fb) {
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            const double s = far / len;
            b = {a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s};
        }
        const double d = dist_point_segment(p, a, b);
        if (d < best) {
            best = d;
            arg = i;
        }
    }
    return {best, arg};
}

}  // namespace detail

/// Winding-number classifier for a fixed (curve kind, tau1, tau2, horizon).
/// Queries are gamma-plane points together with the sign of beta3.
class EnvelopeClassifier {
public:
    EnvelopeClassifier(CurveKind kind, const CurveParams& tmpl, double horizon,
                       std::size_t n = 2048)
        : kind_(kind),
          tmpl_(0.0, 0.0, 0.0, tmpl.beta3() != 0 ? tmpl.beta3() : 1.0, tmpl.tau1(), tmpl.tau2()),
          env_(build_envelope(kind, tmpl_, horizon, n)) {
        poly_.vertices.push_back(*env_.m);
        poly_.vertices.push_back(env_.contact0);
        for (const auto& [x, pt] : env_.samples) poly_.vertices.push_back(pt);
        if (env_.contact_inf) {
            const auto back = poly_.vertices.back();
            if (std::hypot(back.x - env_.contact_inf->x, back.y - env_.contact_inf->y) > 0)
                poly_.vertices.push_back(*env_.contact_inf);
        }
    }

    double horizon() const { return env_.horizon; }
    const EnvelopeCurve& envelope() const { return env_; }
    const ClosedPolyline& polyline() const { return poly_; }

    /// Raw half-space value at the omega end (l_inf or l_T).
    double omega_eval(Vec2 g) const { return env_.line_inf->eval(g); }

    SegmentRecord classify(Vec2 g, Polarity beta3_sign) const {
        SegmentRecord rec = classify_unresolved(g, beta3_sign);
        if (!rec.boundary_flag) return rec;
        // boundary: resolve to the adjacent shape with the fewest extrema;
        // the phase offset keeps the probe directions out of the axis and
        // diagonal wedges that the limiting lines themselves occupy
        const double eps = 1e-6 * (1.0 + std::hypot(g.x, g.y));
        bool found = false;
        SegmentRecord best{};
        for (int k = 0; k < 16; ++k) {
            const double phi = 0.2756 + k * (M_PI / 8.0);
            const Vec2 q{g.x + eps * std::cos(phi), g.y + eps * std::sin(phi)};
            const SegmentRecord cand = classify_unresolved(q, beta3_sign);
            if (cand.boundary_flag) continue;
            if (!found || extrema_count(cand.shape) < extrema_count(best.shape)) {
                best = cand;
                found = true;
            }
        }
        if (found) {
            rec.shape = best.shape;
            rec.winding = best.winding;
            rec.in_d = best.in_d;
        }
        rec.gamma1 = g.x;
        rec.gamma2 = g.y;
        rec.boundary_flag = true;
        return rec;
    }

private:
    SegmentRecord classify_unresolved(Vec2 g, Polarity beta3_sign) const {
        constexpr double kBoundaryTol = 1e-9;
        SegmentRecord rec;
        rec.gamma1 = g.x;
        rec.gamma2 = g.y;

        const double a_val = env_.line0.eval(g);
        const double a_dist = std::fabs(a_val) / std::hypot(env_.line0.b, env_.line0.c);
        const double w_val = env_.line_inf->eval(g);
        const double w_dist = std::fabs(w_val) / std::hypot(env_.line_inf->b, env_.line_inf->c);

        double residual = 0;
        rec.winding = winding_number(poly_, g, &residual);
        auto [dist, edge] = detail::dist_to_polyline(poly_, g);
        const double geom_scale = 1.0 + std::hypot(g.x, g.y);

        // chord error of the sampled envelope can misplace points that are
        // close to it; re-measure against a locally refined arc
        if (dist < 1e-3 * geom_scale) {
            const auto refined = refine_near(g, edge);
            if (refined) {
                rec.winding = winding_number(*refined, g, &residual);
                dist = detail::dist_to_polyline(*refined, g).first;
            }
        }

        rec.boundary_flag = a_dist <= kBoundaryTol * geom_scale ||
                            w_dist <= kBoundaryTol * geom_scale ||
                            dist <= kBoundaryTol * geom_scale || residual >= 0.25;

        rec.in_d = (a_val > 0) != (w_val > 0);
        const std::size_t extrema = 2 * static_cast<std::size_t>(std::abs(rec.winding)) +
                                    (rec.in_d ? 1 : 0);
        const int polarity = beta3_sign == Polarity::positive ? 1 : -1;
        const int init = polarity * (a_val > 0 ? 1 : -1);
        rec.shape = shape_tag_from(init > 0 ? SlopeSign::positive : SlopeSign::negative, extrema);
        return rec;
    }

    /// Polyline with the edges around `edge` replaced by a dense resampling
    /// of the underlying envelope arc. Only envelope edges are refined; the
    /// straight closure segments are exact already.
    std::optional<ClosedPolyline> refine_near(Vec2, std::size_t edge) const {
        // vertices: [M, contact0, samples(0..S-1), (contact_inf)]
        const std::size_t first_sample = 2;
        const std::size_t last_sample = first_sample + env_.samples.size() - 1;
        if (edge + 1 < first_sample || edge > last_sample) return std::nullopt;
        const std::size_t lo_idx = edge >= first_sample + 2 ? edge - first_sample - 2 : 0;
        const std::size_t hi_idx =
            std::min(env_.samples.size() - 1, edge - first_sample + 3);
        if (hi_idx <= lo_idx) return std::nullopt;
        const double x_lo = env_.samples[lo_idx].first;
        const double x_hi = env_.samples[hi_idx].first;

        ClosedPolyline out;
        out.vertices.reserve(poly_.vertices.size() + 256);
        for (std::size_t i = 0; i < first_sample + lo_idx; ++i)
            out.vertices.push_back(poly_.vertices[i]);
        for (int j = 0; j <= 256; ++j) {
            const double x = x_lo * std::pow(x_hi / x_lo, j / 256.0);
            out.vertices.push_back(envelope_point(kind_, tmpl_, x));
        }
        for (std::size_t i = first_sample + hi_idx + 1; i < poly_.vertices.size(); ++i)
            out.vertices.push_back(poly_.vertices[i]);
        return out;
    }

    CurveKind kind_;
    CurveParams tmpl_;
    EnvelopeCurve env_;
    ClosedPolyline poly_;
};

namespace detail {

inline double scale_inverted_t0(const CurveParams& p) {
    return 8.0 * std::fmax(p.tau1(), p.tau2());
}

/// Largest usable horizon: beyond ~600 tau1 the forward basis underflows and
/// l_T degenerates numerically.
inline double horizon_cap(const CurveParams& p) { return 600.0 * p.tau1(); }

}  // namespace detail

/// Classification through the envelope/winding route. Scale-regular
/// parameters close the loop at infinity; scale-inverted ones refine a
/// finite horizon until the answer is stable under two consecutive doublings
/// and the tail sign matches the dominant-term sign.
inline SegmentRecord classify_via_envelope(CurveKind kind, const CurveParams& p) {
    if (p.beta3() == 0)
        throw FamilyError("classify_via_envelope: beta3 == 0 (use classify_ns)");
    const auto g = to_gamma(p);
    const Vec2 gv{g.gamma1, g.gamma2};
    const auto regime = regime_of(p);
    if (regime.tag == RegimeTag::scale_regular) {
        const EnvelopeClassifier cls(kind, p, std::numeric_limits<double>::infinity());
        return cls.classify(gv, g.beta3_sign);
    }
    const SlopeSign s_term = terminal_slope_sign(kind, p);
    double horizon = detail::scale_inverted_t0(p);
    SegmentRecord rec{};
    int stable = 0;
    bool have = false;
    while (true) {
        const EnvelopeClassifier cls(kind, p, horizon);
        const SegmentRecord next = cls.classify(gv, g.beta3_sign);
        const int omega_sign = cls.omega_eval(gv) > 0 ? 1 : -1;
        const bool tail_ok =
            s_term == SlopeSign::zero ||
            omega_sign * (g.beta3_sign == Polarity::positive ? 1 : -1) ==
                static_cast<int>(s_term);
        if (have && next.shape == rec.shape && next.winding == rec.winding &&
            next.in_d == rec.in_d)
            ++stable;
        else
            stable = 0;
        rec = next;
        have = true;
        horizon *= 2.0;
        if ((stable >= 2 && tail_ok) || horizon > detail::horizon_cap(p)) break;
    }
    return rec;
}

/// Closed-form Nelson-Siegel segmentation. The published forward-curve table
/// prints the normal and inverse cells swapped relative to what the curve
/// derivative gives; the predicates below follow the derivative. Boundaries
/// resolve to the shape with fewer extrema.
inline ShapeTag classify_ns(double beta1, double beta2, CurveKind kind) {
    if (beta1 == 0 && beta2 == 0) return ShapeTag::flat;
    if (kind == CurveKind::forward) {
        if (beta2 >= 0 && beta1 >= beta2) return ShapeTag::i;
        if (beta2 <= 0 && beta1 <= beta2) return ShapeTag::n;
        if (beta2 > 0) return ShapeTag::h;
        return ShapeTag::d;
    }
    if (beta1 <= -std::fabs(beta2)) return ShapeTag::n;
    if (beta1 >= std::fabs(beta2)) return ShapeTag::i;
    if (beta2 > std::fabs(beta1)) return ShapeTag::h;
    return ShapeTag::d;
}

/// Published attainable-shape sets per family, regime and sign of beta3.
inline std::set<ShapeTag> attainable_shapes(Family family, double r, Polarity beta3_sign) {
    using S = ShapeTag;
    if (!(r > 0) || !std::isfinite(r)) throw ArgumentError("attainable_shapes: invalid ratio");
    if (family == Family::nelson_siegel) return {S::n, S::i, S::h, S::d};
    if (r == 1.0) throw ArgumentError("attainable_shapes: r == 1 is degenerate");
    const bool pos = beta3_sign == Polarity::positive;
    if (family == Family::svensson) {
        if (r > 1.0)
            return pos ? std::set<S>{S::n, S::i, S::h, S::d, S::hd, S::hdh}
                       : std::set<S>{S::n, S::i, S::h, S::d, S::dh, S::dhd};
        if (r >= 1.0 / 3.0)
            return pos ? std::set<S>{S::i, S::h, S::dh} : std::set<S>{S::n, S::d, S::hd};
        return pos ? std::set<S>{S::i, S::h, S::dh, S::hdh}
                   : std::set<S>{S::n, S::d, S::hd, S::dhd};
    }
    // Bliss
    if (r > 1.0)
        return pos ? std::set<S>{S::n, S::i, S::h, S::hd} : std::set<S>{S::n, S::i, S::d, S::dh};
    if (r >= 0.5) return pos ? std::set<S>{S::i, S::h} : std::set<S>{S::n, S::d};
    return pos ? std::set<S>{S::i, S::h, S::dh} : std::set<S>{S::n, S::d, S::hd};
}

/// Rectangular classification grid.
struct GridSpec {
    double x0, x1;  // gamma1 range
    double y0, y1;  // gamma2 range
    std::size_t nx, ny;
};

/// Classifies every node of the grid via the envelope route, row-major in
/// gamma2 (outer) then gamma1 (inner). Nodes are independent; `threads`
/// bounds the worker count and the output order never depends on it.
inline std::vector<SegmentRecord> segment_grid(CurveKind kind, const CurveParams& tmpl,
                                               const GridSpec& grid, unsigned threads = 1) {
    if (grid.nx < 2 || grid.ny < 2) throw ArgumentError("segment_grid: need at least 2x2 nodes");
    if (!(grid.x0 < grid.x1) || !(grid.y0 < grid.y1))
        throw ArgumentError("segment_grid: empty rectangle");
    if (tmpl.beta3() == 0) throw FamilyError("segment_grid: beta3 == 0 has no gamma plane");

    const Polarity sign = tmpl.beta3() > 0 ? Polarity::positive : Polarity::negative;
    const auto regime = regime_of(tmpl);
    std::vector<Vec2> nodes;
    nodes.reserve(grid.nx * grid.ny);
    for (std::size_t iy = 0; iy < grid.ny; ++iy)
        for (std::size_t ix = 0; ix < grid.nx; ++ix)
            nodes.push_back({grid.x0 + (grid.x1 - grid.x0) * ix / (grid.nx - 1.0),
                             grid.y0 + (grid.y1 - grid.y0) * iy / (grid.ny - 1.0)});

    auto run_pass = [&](const EnvelopeClassifier& cls, std::vector<SegmentRecord>& out) {
        out.resize(nodes.size());
        const unsigned nw = std::max(1u, threads);
        auto work = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) out[i] = cls.classify(nodes[i], sign);
        };
        if (nw == 1) {
            work(0, nodes.size());
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (nodes.size() + nw - 1) / nw;
            for (unsigned w = 0; w < nw; ++w) {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(nodes.size(), lo + chunk);
                if (lo < hi) pool.emplace_back(work, lo, hi);
            }
            for (auto& t : pool) t.join();
        }
    };

    std::vector<SegmentRecord> out;
    if (regime.tag == RegimeTag::scale_regular) {
        const EnvelopeClassifier cls(kind, tmpl, std::numeric_limits<double>::infinity());
        run_pass(cls, out);
        return out;
    }

    // scale-inverted: double the horizon until the whole grid is stable
    double horizon = detail::scale_inverted_t0(tmpl);
    int stable = 0;
    std::vector<SegmentRecord> prev;
    while (true) {
        const EnvelopeClassifier cls(kind, tmpl, horizon);
        run_pass(cls, out);
        bool same = !prev.empty();
        if (same)
            for (std::size_t i = 0; i < out.size(); ++i)
                if (out[i].shape != prev[i].shape || out[i].winding != prev[i].winding ||
                    out[i].in_d != prev[i].in_d) {
                    same = false;
                    break;
                }
        stable = same ? stable + 1 : 0;
        prev = out;
        horizon *= 2.0;
        if (stable >= 2 || horizon > detail::horizon_cap(tmpl)) break;
    }
    return out;
}

}  // namespace termshape
