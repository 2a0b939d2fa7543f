#pragma once

#include <string>
#include <vector>

#include "termshape/curve.hpp"
#include "termshape/errors.hpp"

namespace termshape {

/// Shape taxonomy by the sign sequence of the derivative:
/// n "+", i "-", h "+-", d "-+", hd "+-+", dh "-+-", hdh "+-+-", dhd "-+-+".
/// flat covers the identically-zero derivative, which the sequence taxonomy
/// does not name.
enum class ShapeTag { flat, n, i, h, d, hd, dh, hdh, dhd };

enum class ExtremumKind { hump, dip };

struct Extremum {
    double x;
    ExtremumKind kind;
};

struct Shape {
    ShapeTag tag = ShapeTag::flat;
    std::vector<Extremum> extrema;
};

/// Tag for a derivative that starts with sign `initial` and changes sign
/// `extrema` times.
inline ShapeTag shape_tag_from(SlopeSign initial, std::size_t extrema) {
    if (initial == SlopeSign::zero) {
        if (extrema == 0) return ShapeTag::flat;
        throw InternalError("shape_tag_from: ambiguous initial sign");
    }
    static constexpr ShapeTag pos[4] = {ShapeTag::n, ShapeTag::h, ShapeTag::hd, ShapeTag::hdh};
    static constexpr ShapeTag neg[4] = {ShapeTag::i, ShapeTag::d, ShapeTag::dh, ShapeTag::dhd};
    if (extrema > 3) throw InternalError("shape_tag_from: more than three extrema");
    return initial == SlopeSign::positive ? pos[extrema] : neg[extrema];
}

inline std::size_t extrema_count(ShapeTag t) {
    switch (t) {
        case ShapeTag::flat:
        case ShapeTag::n:
        case ShapeTag::i: return 0;
        case ShapeTag::h:
        case ShapeTag::d: return 1;
        case ShapeTag::hd:
        case ShapeTag::dh: return 2;
        default: return 3;
    }
}

inline const char* to_string(ShapeTag t) {
    switch (t) {
        case ShapeTag::flat: return "flat";
        case ShapeTag::n: return "n";
        case ShapeTag::i: return "i";
        case ShapeTag::h: return "h";
        case ShapeTag::d: return "d";
        case ShapeTag::hd: return "hd";
        case ShapeTag::dh: return "dh";
        case ShapeTag::hdh: return "hdh";
        default: return "dhd";
    }
}

inline const char* to_string(ExtremumKind k) { return k == ExtremumKind::hump ? "hump" : "dip"; }

/// Hump/dip mirror of a tag (the beta3 polarity flip).
inline ShapeTag mirrored(ShapeTag t) {
    switch (t) {
        case ShapeTag::n: return ShapeTag::i;
        case ShapeTag::i: return ShapeTag::n;
        case ShapeTag::h: return ShapeTag::d;
        case ShapeTag::d: return ShapeTag::h;
        case ShapeTag::hd: return ShapeTag::dh;
        case ShapeTag::dh: return ShapeTag::hd;
        case ShapeTag::hdh: return ShapeTag::dhd;
        case ShapeTag::dhd: return ShapeTag::hdh;
        default: return ShapeTag::flat;
    }
}

}  // namespace termshape
