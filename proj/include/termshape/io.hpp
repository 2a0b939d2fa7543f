#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "termshape/dynamics.hpp"
#include "termshape/envelope.hpp"
#include "termshape/ingest.hpp"
#include "termshape/segmentation.hpp"
#include "termshape/shape.hpp"

namespace termshape::io {

using nlohmann::json;

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline json to_json(const Shape& s) {
    json extrema = json::array();
    for (const auto& e : s.extrema) extrema.push_back({{"x", e.x}, {"kind", to_string(e.kind)}});
    return {{"shape", to_string(s.tag)}, {"extrema", extrema}};
}

inline std::string shape_csv(const Shape& s) {
    std::string out = "shape,x,kind\n";
    if (s.extrema.empty()) return out + to_string(s.tag) + ",,\n";
    for (const auto& e : s.extrema)
        out += std::string(to_string(s.tag)) + "," + fmt(e.x) + "," + to_string(e.kind) + "\n";
    return out;
}

inline json to_json(const LineCoeffs& l) { return {{"a", l.a}, {"b", l.b}, {"c", l.c}}; }

inline json to_json(const Vec2& v) { return json::array({v.x, v.y}); }

inline json to_json(const EnvelopeCurve& env) {
    json samples = json::array();
    for (const auto& [x, pt] : env.samples) samples.push_back(json::array({x, pt.x, pt.y}));
    json out{{"curve", to_string(env.kind)},
             {"horizon", std::isinf(env.horizon) ? json("inf") : json(env.horizon)},
             {"line0", to_json(env.line0)},
             {"contact0", to_json(env.contact0)},
             {"samples", samples}};
    if (env.line_inf) out["line_inf"] = to_json(*env.line_inf);
    if (env.contact_inf) out["contact_inf"] = to_json(*env.contact_inf);
    if (env.m) out["m"] = to_json(*env.m);
    if (env.cusp) out["cusp"] = {{"x", env.cusp->first}, {"point", to_json(env.cusp->second)}};
    return out;
}

/// Envelope export: the rows follow the augmented loop (basepoint, contact on
/// l_0, the envelope samples with a cusp marker, contact at the far end,
/// basepoint again).
inline std::string envelope_csv(const EnvelopeCurve& env) {
    std::string out = "x,gamma1,gamma2,segment\n";
    auto row = [&](double x, Vec2 p, const char* tag) {
        out += (std::isinf(x) ? std::string("inf") : fmt(x)) + "," + fmt(p.x) + "," + fmt(p.y) +
               "," + tag + "\n";
    };
    if (env.m) row(0.0, *env.m, "l0");
    row(0.0, env.contact0, "l0");
    for (const auto& [x, pt] : env.samples) {
        if (env.cusp && x == env.cusp->first) row(x, pt, "cusp");
        else row(x, pt, "envelope");
    }
    if (env.contact_inf) row(env.horizon, *env.contact_inf, "linf");
    if (env.m) row(env.horizon, *env.m, "linf");
    return out;
}

inline json to_json(const SegmentRecord& r) {
    return {{"gamma1", r.gamma1},   {"gamma2", r.gamma2},
            {"shape", to_string(r.shape)}, {"winding", r.winding},
            {"in_D", r.in_d},       {"boundary_flag", r.boundary_flag}};
}

inline json to_json(const std::vector<SegmentRecord>& recs) {
    json out = json::array();
    for (const auto& r : recs) out.push_back(to_json(r));
    return out;
}

inline std::string grid_csv(const std::vector<SegmentRecord>& recs) {
    std::string out = "gamma1,gamma2,shape,winding,in_D,boundary_flag\n";
    for (const auto& r : recs)
        out += fmt(r.gamma1) + "," + fmt(r.gamma2) + "," + to_string(r.shape) + "," +
               std::to_string(r.winding) + "," + (r.in_d ? "1" : "0") + "," +
               (r.boundary_flag ? "1" : "0") + "\n";
    return out;
}

inline json to_json(const Horizons& h) {
    return {{"branch", h.branch},
            {"t_dagger_f", h.t_dagger_f},
            {"t_dagger_y", h.t_dagger_y},
            {"t_star_f", h.t_star_f},
            {"t_star_star_y", h.t_star_star_y},
            {"t_star_y", h.t_star_y}};
}

inline json to_json(const ShapeDistribution& d) {
    json probs = json::object();
    for (const auto& [tag, p] : d.probs) probs[to_string(tag)] = p;
    return {{"t", d.t}, {"curve", to_string(d.kind)}, {"probabilities", probs}};
}

inline std::string distribution_csv(const ShapeDistribution& d) {
    std::string out = "shape,probability\n";
    for (const auto& [tag, p] : d.probs)
        out += std::string(to_string(tag)) + "," + fmt(p) + "\n";
    return out;
}

inline json to_json(const FrequencyReport& rep) {
    json regimes = json::object();
    for (const auto& [cell, c] : rep.regimes)
        regimes[cell] = {{"count", c.count}, {"pct", c.pct}};
    json shapes = json::object();
    for (const auto& [tag, c] : rep.shapes)
        shapes[to_string(tag)] = {{"count", c.count}, {"pct", c.pct}};
    json series = json::array();
    for (const auto& pt : rep.series)
        series.push_back({{"date", pt.date},
                          {"r", pt.r},
                          {"beta3_sign", pt.beta3_sign},
                          {"regime", pt.regime},
                          {"shape", to_string(pt.shape)}});
    return {{"curve", to_string(rep.kind)},
            {"total", rep.total},
            {"regimes", regimes},
            {"shapes", shapes},
            {"series", series}};
}

inline std::string report_series_csv(const FrequencyReport& rep) {
    std::string out = "date,r,beta3_sign,regime,shape\n";
    for (const auto& pt : rep.series)
        out += pt.date + "," + fmt(pt.r) + "," + std::to_string(pt.beta3_sign) + "," + pt.regime +
               "," + to_string(pt.shape) + "\n";
    return out;
}

}  // namespace termshape::io
