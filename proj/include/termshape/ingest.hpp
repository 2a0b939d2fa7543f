#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "termshape/curve.hpp"
#include "termshape/shape_scan.hpp"

namespace termshape {

/// Column mapping for delimited parameter files. The defaults follow the
/// ECB-style export layout (header names are matched case-insensitively).
struct ParseConfig {
    char delimiter = ',';
    std::string date_column = "DATE";
    std::string beta0_column = "BETA0";
    std::string beta1_column = "BETA1";
    std::string beta2_column = "BETA2";
    std::string beta3_column = "BETA3";
    std::string tau1_column = "TAU1";
    std::string tau2_column = "TAU2";
    std::string date_format = "YYYY-MM-DD";  // tokens YYYY, MM, DD
};

struct SeriesRow {
    std::string date;  // as read from the input
    long key = 0;      // comparable yyyymmdd
    CurveParams params{0, 0, 0, 0, 1, 1};
};

struct QuarantinedRow {
    std::size_t line = 0;
    std::string reason;
    std::string raw;
};

struct ParamSeries {
    std::vector<SeriesRow> rows;
};

struct ParseResult {
    ParamSeries series;
    std::vector<QuarantinedRow> quarantine;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

inline bool iequals(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

inline std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(trim(field));
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

inline std::optional<double> parse_number(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0;
    const auto* begin = t.data();
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
    return v;
}

/// Date key per the YYYY/MM/DD token positions of the format string.
inline std::optional<long> parse_date_key(const std::string& value, const std::string& format) {
    if (value.size() != format.size()) return std::nullopt;
    long y = 0, m = 0, d = 0;
    for (std::size_t i = 0; i < format.size(); ++i) {
        const char f = format[i];
        const char c = value[i];
        if (f == 'Y' || f == 'M' || f == 'D') {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            const int digit = c - '0';
            if (f == 'Y') y = y * 10 + digit;
            if (f == 'M') m = m * 10 + digit;
            if (f == 'D') d = d * 10 + digit;
        } else if (f != c) {
            return std::nullopt;
        }
    }
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return y * 10000 + m * 100 + d;
}

}  // namespace detail

/// Parses a delimited parameter series. Malformed rows are quarantined with
/// a reason; non-increasing dates and missing columns are hard errors.
inline ParseResult parse_series(std::istream& in, const ParseConfig& cfg = {}) {
    if (!in) throw IoError("parse_series: unreadable input stream");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("parse_series: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = detail::split(line, cfg.delimiter);
    auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (detail::iequals(header[i], name)) return static_cast<long>(i);
        return -1L;
    };
    const long c_date = find_col(cfg.date_column);
    const long c_b0 = find_col(cfg.beta0_column);
    const long c_b1 = find_col(cfg.beta1_column);
    const long c_b2 = find_col(cfg.beta2_column);
    const long c_b3 = find_col(cfg.beta3_column);
    const long c_t1 = find_col(cfg.tau1_column);
    const long c_t2 = find_col(cfg.tau2_column);
    for (long c : {c_date, c_b0, c_b1, c_b2, c_b3, c_t1, c_t2})
        if (c < 0) throw SchemaError("parse_series: mandatory column missing from header");

    ParseResult out;
    std::size_t line_no = 1;
    long last_key = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split(line, cfg.delimiter);
        auto quarantine = [&](const std::string& reason) {
            out.quarantine.push_back({line_no, reason, line});
        };
        const std::size_t needed = static_cast<std::size_t>(
            std::max({c_date, c_b0, c_b1, c_b2, c_b3, c_t1, c_t2}));
        if (fields.size() <= needed) {
            quarantine("too few fields");
            continue;
        }
        const auto key = detail::parse_date_key(fields[c_date], cfg.date_format);
        if (!key) {
            quarantine("unparseable date");
            continue;
        }
        if (*key <= last_key)
            throw SchemaError("parse_series: dates must be strictly increasing (line " +
                              std::to_string(line_no) + ")");
        const auto b0 = detail::parse_number(fields[c_b0]);
        const auto b1 = detail::parse_number(fields[c_b1]);
        const auto b2 = detail::parse_number(fields[c_b2]);
        const auto b3 = detail::parse_number(fields[c_b3]);
        const auto t1 = detail::parse_number(fields[c_t1]);
        const auto t2 = detail::parse_number(fields[c_t2]);
        if (!b0 || !b1 || !b2 || !b3 || !t1 || !t2) {
            quarantine("malformed numeric field");
            continue;
        }
        if (!(*t1 > 0)) {
            quarantine("tau1 must be positive");
            continue;
        }
        if (!(*t2 > 0)) {
            quarantine("tau2 must be positive");
            continue;
        }
        if (*b3 != 0 && *t1 == *t2) {
            quarantine("tau1 == tau2 with beta3 != 0");
            continue;
        }
        try {
            SeriesRow row{fields[c_date], *key, CurveParams(*b0, *b1, *b2, *b3, *t1, *t2)};
            last_key = *key;
            out.series.rows.push_back(std::move(row));
        } catch (const Error& e) {
            quarantine(e.what());
        }
    }
    return out;
}

inline ParseResult parse_series_file(const std::string& path, const ParseConfig& cfg = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("parse_series: cannot open '" + path + "'");
    return parse_series(in, cfg);
}

/// Serializes a series back to delimited text; numbers keep full precision
/// so that a reparse reproduces the series bit for bit.
inline std::string serialize_series(const ParamSeries& series, const ParseConfig& cfg = {}) {
    std::ostringstream out;
    const char d = cfg.delimiter;
    out << cfg.date_column << d << cfg.beta0_column << d << cfg.beta1_column << d
        << cfg.beta2_column << d << cfg.beta3_column << d << cfg.tau1_column << d
        << cfg.tau2_column << "\n";
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& row : series.rows) {
        const auto& p = row.params;
        out << row.date << d << num(p.beta0()) << d << num(p.beta1()) << d << num(p.beta2()) << d
            << num(p.beta3()) << d << num(p.tau1()) << d << num(p.tau2()) << "\n";
    }
    return out.str();
}

/// Regime/shape tallies over a series, split by the sign of beta3, with the
/// per-date classification series behind them. Percentages are rounded to
/// one decimal; the raw counts stay alongside.
struct FrequencyReport {
    struct Cell {
        std::size_t count = 0;
        double pct = 0;
    };
    struct Point {
        std::string date;
        double r = 0;
        int beta3_sign = 0;  // 0 marks beta3 == 0 rows
        std::string regime;  // "sr", "wsi", "ssi" or "ns"
        ShapeTag shape = ShapeTag::flat;
    };
    CurveKind kind = CurveKind::forward;
    std::size_t total = 0;
    std::map<std::string, Cell> regimes;  // keys like "sr/+", "wsi/-", "ns"
    std::map<ShapeTag, Cell> shapes;
    std::vector<Point> series;
};

inline FrequencyReport frequency_report(const ParamSeries& series, CurveKind kind) {
    if (series.rows.empty()) throw ArgumentError("frequency_report: empty series");
    FrequencyReport rep;
    rep.kind = kind;
    rep.total = series.rows.size();
    for (const auto& row : series.rows) {
        const auto& p = row.params;
        FrequencyReport::Point pt;
        pt.date = row.date;
        pt.r = p.tau1() / p.tau2();
        std::string cell;
        if (p.beta3() == 0) {
            pt.beta3_sign = 0;
            pt.regime = "ns";
            cell = "ns";
        } else {
            pt.beta3_sign = p.beta3() > 0 ? 1 : -1;
            pt.regime = to_string(regime_of(p).tag);
            cell = pt.regime + (p.beta3() > 0 ? "/+" : "/-");
        }
        pt.shape = classify_direct(kind, p).tag;
        rep.regimes[cell].count += 1;
        rep.shapes[pt.shape].count += 1;
        rep.series.push_back(std::move(pt));
    }
    const double n = static_cast<double>(rep.total);
    for (auto& [k, c] : rep.regimes) c.pct = std::round(1000.0 * c.count / n) / 10.0;
    for (auto& [k, c] : rep.shapes) c.pct = std::round(1000.0 * c.count / n) / 10.0;
    return rep;
}

}  // namespace termshape
