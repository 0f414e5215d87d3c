#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pvuptake/errors.hpp"
#include "pvuptake/month.hpp"

namespace pvuptake {

/// Unit tag carried by every series. Purely metadata, but operations that
/// combine series check it, which catches Euro/kWh-vs-Euro/kWp mixups early.
enum class Unit {
    eur_per_kwh,
    eur_per_kwp,
    fraction,
    count,
    dimensionless,
};

inline std::string_view unit_name(Unit u) {
    switch (u) {
        case Unit::eur_per_kwh: return "Euro/kWh";
        case Unit::eur_per_kwp: return "Euro/kWp";
        case Unit::fraction: return "fraction";
        case Unit::count: return "count";
        case Unit::dimensionless: return "dimensionless";
    }
    return "?";
}

/// One value per calendar month over a contiguous range. Immutable after
/// construction; safe to share across threads.
class MonthlyTimeSeries {
public:
    MonthlyTimeSeries(MonthIndex start, std::vector<double> values, Unit unit)
        : start_(start), values_(std::move(values)), unit_(unit) {
        if (values_.empty())
            throw input_error(input_errc::empty_input, "series must contain at least one month");
        for (size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i]))
                throw input_error(input_errc::bad_argument,
                                  "non-finite value at " + start_.plus_months(static_cast<int>(i)).str());
    }

    MonthIndex first() const { return start_; }
    MonthIndex last() const { return start_.plus_months(static_cast<int>(values_.size()) - 1); }
    size_t size() const { return values_.size(); }
    Unit unit() const { return unit_; }
    std::span<const double> values() const { return values_; }
    double operator[](size_t i) const { return values_[i]; }

    bool covers(MonthIndex m) const { return m >= first() && m <= last(); }
    bool covers(MonthIndex a, MonthIndex b) const { return covers(a) && covers(b) && a <= b; }

    double at(MonthIndex m) const {
        if (!covers(m))
            throw input_error(input_errc::coverage,
                              "month " + m.str() + " outside series range " + range_str());
        return values_[static_cast<size_t>(months_between(start_, m))];
    }

    /// Copy restricted to [a, b]; both ends must be covered.
    MonthlyTimeSeries slice(MonthIndex a, MonthIndex b) const {
        if (!covers(a, b))
            throw input_error(input_errc::coverage,
                              "slice [" + a.str() + ", " + b.str() + "] outside series range " + range_str());
        const auto off = static_cast<size_t>(months_between(start_, a));
        const auto len = static_cast<size_t>(months_between(a, b)) + 1;
        return MonthlyTimeSeries(a, {values_.begin() + off, values_.begin() + off + len}, unit_);
    }

    std::string range_str() const { return "[" + first().str() + ", " + last().str() + "]"; }

private:
    MonthIndex start_;
    std::vector<double> values_;
    Unit unit_;
};

inline void require_unit(const MonthlyTimeSeries& s, Unit expected, std::string_view what) {
    if (s.unit() != expected)
        throw input_error(input_errc::unit_mismatch,
                          std::string(what) + " must be in " + std::string(unit_name(expected)) +
                              ", got " + std::string(unit_name(s.unit())));
}

inline void require_same_range(const MonthlyTimeSeries& a, const MonthlyTimeSeries& b,
                               std::string_view what) {
    if (a.first() != b.first() || a.size() != b.size())
        throw input_error(input_errc::misaligned,
                          std::string(what) + ": ranges differ, " + a.range_str() + " vs " + b.range_str());
}

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

namespace detail {

inline double parse_value(std::string_view token, const std::string& context) {
    double v = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [p, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        throw input_error(input_errc::parse,
                          "unparsable value '" + std::string(token) + "' in " + context);
    return v;
}

/// Reads (month, value) rows from a "month,value" CSV. Shared by the strict
/// monthly loader and the anchor loader.
inline std::vector<std::pair<MonthIndex, double>> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw input_error(input_errc::io, "cannot open file " + path.string());

    std::string line;
    size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line())
        throw input_error(input_errc::empty_input, "empty file " + path.string());
    if (line != "month,value")
        throw input_error(input_errc::parse,
                          path.string() + ": expected header 'month,value', got '" + line + "'");

    std::vector<std::pair<MonthIndex, double>> rows;
    while (next_line()) {
        const auto comma = line.find(',');
        const std::string context = path.filename().string() + " line " + std::to_string(lineno);
        if (comma == std::string::npos)
            throw input_error(input_errc::parse, "missing ',' in " + context + ": '" + line + "'");
        MonthIndex m;
        try {
            m = MonthIndex::parse(std::string_view(line).substr(0, comma));
        } catch (const input_error& e) {
            throw input_error(input_errc::parse, std::string(e.what()) + " in " + context);
        }
        rows.emplace_back(m, parse_value(std::string_view(line).substr(comma + 1), context));
    }
    if (rows.empty())
        throw input_error(input_errc::empty_input, "no data rows in " + path.string());

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].first == rows[i - 1].first)
            throw input_error(input_errc::duplicate_month,
                              "duplicate month " + rows[i].first.str() + " in " + path.string());
    return rows;
}

} // namespace detail

/// Loads a strictly monthly series; any missing month is a gap error naming
/// the first absent month.
inline MonthlyTimeSeries load_series(const std::filesystem::path& path, Unit expected_unit) {
    auto rows = detail::read_rows(path);
    std::vector<double> values;
    values.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && months_between(rows[i - 1].first, rows[i].first) != 1)
            throw input_error(input_errc::gap,
                              "gap in " + path.string() + ": missing month " +
                                  rows[i - 1].first.next().str());
        values.push_back(rows[i].second);
    }
    return MonthlyTimeSeries(rows[0].first, std::move(values), expected_unit);
}

/// Loads sparse (month, value) anchor rows, e.g. a quarterly cost file.
inline std::vector<std::pair<MonthIndex, double>> load_anchors(const std::filesystem::path& path) {
    return detail::read_rows(path);
}

inline void write_series(const std::filesystem::path& path, const MonthlyTimeSeries& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw input_error(input_errc::io, "cannot write file " + path.string());
    out << "month,value\n";
    for (size_t i = 0; i < s.size(); ++i)
        out << s.first().plus_months(static_cast<int>(i)).str() << ',' << format_double(s[i]) << '\n';
}

/// Linear interpolation of coarse anchors onto the monthly grid. Anchors are
/// reproduced exactly; nothing is extrapolated beyond the first/last anchor.
inline MonthlyTimeSeries interpolate_to_monthly(std::span<const std::pair<MonthIndex, double>> anchors,
                                                Unit unit) {
    if (anchors.size() < 2)
        throw input_error(input_errc::bad_argument,
                          "interpolation needs at least 2 anchors, got " + std::to_string(anchors.size()));
    for (size_t i = 1; i < anchors.size(); ++i)
        if (!(anchors[i - 1].first < anchors[i].first))
            throw input_error(input_errc::bad_argument,
                              "anchor months must be strictly increasing at " + anchors[i].first.str());

    const auto total = static_cast<size_t>(months_between(anchors.front().first, anchors.back().first)) + 1;
    std::vector<double> values(total);
    for (size_t seg = 0; seg + 1 < anchors.size(); ++seg) {
        const auto [m0, y0] = anchors[seg];
        const auto [m1, y1] = anchors[seg + 1];
        const auto base = static_cast<size_t>(months_between(anchors.front().first, m0));
        const auto span_months = static_cast<size_t>(months_between(m0, m1));
        values[base] = y0;
        for (size_t j = 1; j < span_months; ++j)
            values[base + j] = y0 + (y1 - y0) * (static_cast<double>(j) / static_cast<double>(span_months));
    }
    values[total - 1] = anchors.back().second;
    return MonthlyTimeSeries(anchors.front().first, std::move(values), unit);
}

inline MonthlyTimeSeries interpolate_to_monthly(
    std::initializer_list<std::pair<MonthIndex, double>> anchors, Unit unit) {
    return interpolate_to_monthly(std::span<const std::pair<MonthIndex, double>>(anchors.begin(), anchors.size()), unit);
}

struct AlignedRange {
    MonthIndex first;
    MonthIndex last;
    std::vector<MonthlyTimeSeries> series;
};

/// Restricts every series to the intersection of all ranges.
inline AlignedRange align(std::span<const MonthlyTimeSeries* const> series_set) {
    if (series_set.empty())
        throw input_error(input_errc::empty_input, "align: no series given");
    MonthIndex lo = series_set.front()->first();
    MonthIndex hi = series_set.front()->last();
    for (const auto* s : series_set) {
        lo = std::max(lo, s->first());
        hi = std::min(hi, s->last());
    }
    if (lo > hi)
        throw input_error(input_errc::empty_intersection,
                          "series ranges have empty intersection (latest start " + lo.str() +
                              " after earliest end " + hi.str() + ")");
    AlignedRange out{lo, hi, {}};
    out.series.reserve(series_set.size());
    for (const auto* s : series_set) out.series.push_back(s->slice(lo, hi));
    return out;
}

inline AlignedRange align(std::initializer_list<const MonthlyTimeSeries*> series_set) {
    return align(std::span<const MonthlyTimeSeries* const>(series_set.begin(), series_set.size()));
}

} // namespace pvuptake
