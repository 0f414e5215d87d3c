#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pvuptake/errors.hpp"
#include "pvuptake/month.hpp"
#include "pvuptake/timeseries.hpp"

namespace pvuptake {

/// splitmix64-based stream keyed by (seed, month, sample index, parameter
/// index). Every parameter of every sample owns an independent stream, so a
/// drawn value is a pure function of that tuple no matter how the index set
/// is partitioned across threads.
class SampleStream {
public:
    SampleStream(uint64_t seed, long long month_code, uint64_t sample_index, uint32_t param_index) {
        uint64_t h = mix(seed ^ 0x243f6a8885a308d3ull);
        h = mix(h ^ static_cast<uint64_t>(month_code));
        h = mix(h ^ sample_index);
        state_ = mix(h ^ param_index);
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (cosine branch).
    double normal01() {
        const double u1 = 1.0 - unit(); // (0, 1], keeps log() finite
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t state_;
};

namespace detail {

/// Marsaglia-Tsang gamma variate, shape >= 1.
inline double gamma_variate(double shape, SampleStream& s) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = s.normal01();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = s.unit();
        if (u == 0.0) continue;
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

} // namespace detail

/// PERT-beta draw characterized by (min, mode, max): shape constant 4, so
/// alpha = 1 + 4*(mode-min)/(max-min) and beta = 1 + 4*(max-mode)/(max-min).
/// The distribution's mode is the given mode and its mean is
/// (min + 4*mode + max) / 6. Degenerate min == max returns the point mass.
inline double sample_beta_mmm(double min, double mode, double max, SampleStream& s) {
    if (!(min <= mode && mode <= max))
        throw input_error(input_errc::bad_argument,
                          "beta_mmm requires min <= mode <= max, got (" + format_double(min) + ", " +
                              format_double(mode) + ", " + format_double(max) + ")");
    if (min == max) return mode;
    const double range = max - min;
    const double a = 1.0 + 4.0 * (mode - min) / range;
    const double b = 1.0 + 4.0 * (max - mode) / range;
    const double g1 = detail::gamma_variate(a, s);
    const double g2 = detail::gamma_variate(b, s);
    return min + range * (g1 / (g1 + g2));
}

/// Uniform on the half-open interval (min, max], realized as min + (max-min)*(1-u).
inline double sample_uniform_open_low(double min, double max, SampleStream& s) {
    if (!(min < max))
        throw input_error(input_errc::bad_argument, "uniform requires min < max");
    return min + (max - min) * (1.0 - s.unit());
}

/// Normal truncated at zero: negative draws are rejected and redrawn.
inline double sample_normal_nonnegative(double mean, double sd, SampleStream& s) {
    if (!(sd >= 0.0))
        throw input_error(input_errc::bad_argument, "normal requires sd >= 0");
    if (sd == 0.0) {
        if (mean < 0.0)
            throw input_error(input_errc::bad_argument, "degenerate normal with negative mean");
        return mean;
    }
    for (int attempt = 0; attempt < 1024; ++attempt) {
        const double x = mean + sd * s.normal01();
        if (x >= 0.0) return x;
    }
    throw input_error(input_errc::bad_argument,
                      "normal(" + format_double(mean) + ", " + format_double(sd) +
                          ") is almost surely negative; cannot truncate at zero");
}

/// One random-input specification (a row of the input-parameter table).
struct ParameterSpec {
    enum class Kind { constant, uniform, normal, beta_mmm };

    std::string name;
    Kind kind = Kind::constant;
    // constant: p1 = value
    // uniform:  p1 = min, p2 = max          (draws on (min, max])
    // normal:   p1 = mean (NaN = take the month's series value), p2 = sd;
    //           sd_relative scales p2 by the mean
    // beta_mmm: p1 = min, p2 = mode, p3 = max
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    bool sd_relative = false;

    void validate() const {
        switch (kind) {
            case Kind::constant:
                break;
            case Kind::uniform:
                if (!(p1 < p2))
                    throw input_error(input_errc::bad_argument,
                                      name + ": uniform requires min < max");
                break;
            case Kind::normal:
                if (!(p2 >= 0.0))
                    throw input_error(input_errc::bad_argument, name + ": normal requires sd >= 0");
                break;
            case Kind::beta_mmm:
                if (!(p1 <= p2 && p2 <= p3))
                    throw input_error(input_errc::bad_argument,
                                      name + ": beta_mmm requires min <= mode <= max");
                break;
        }
    }

    bool mean_from_series() const { return kind == Kind::normal && std::isnan(p1); }

    /// Draws one value. series_mean supplies the month's series value for
    /// normal specs whose mean is series-driven.
    double draw(SampleStream& s, double series_mean = std::numeric_limits<double>::quiet_NaN()) const {
        switch (kind) {
            case Kind::constant:
                return p1;
            case Kind::uniform:
                return sample_uniform_open_low(p1, p2, s);
            case Kind::normal: {
                const double mean = mean_from_series() ? series_mean : p1;
                if (!std::isfinite(mean))
                    throw input_error(input_errc::bad_argument,
                                      name + ": series-driven mean is unavailable");
                const double sd = sd_relative ? p2 * mean : p2;
                return sample_normal_nonnegative(mean, sd, s);
            }
            case Kind::beta_mmm:
                return sample_beta_mmm(p1, p2, p3, s);
        }
        throw internal_error("unreachable parameter kind");
    }
};

/// One candidate rooftop system drawn for a given month. Tariffs and prices
/// are frozen at installation time for the whole lifetime.
struct SystemSample {
    double size_kwp = 0.0;                  // s, (0, 10]
    double specific_cost_eur_per_kwp = 0.0; // I0 draw, before size scaling
    double performance_ratio = 0.0;         // PR, [0, 1]
    double self_consumption = 0.0;          // SC, [0, 1]
    double degradation = 0.0;               // d, [0, 0.02] per year
    double inclination_factor = 0.0;        // gamma, (0, 1]
    double irradiance_kwh_per_m2_yr = 0.0;  // H_opt
    double om_share = 0.0;                  // yearly O&M as share of C0
    double retail_price_eur_per_kwh = 0.0;  // e
    double tariff_eur_per_kwh = 0.0;        // f
    double sc_tariff_eur_per_kwh = 0.0;     // f_SC
    int lifetime_years = 20;                // T
};

inline void validate_sample(const SystemSample& x) {
    auto fail = [](const std::string& msg) {
        throw input_error(input_errc::bad_argument, "invalid system sample: " + msg);
    };
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!(x.size_kwp > 0.0 && x.size_kwp <= 10.0)) fail("size must be in (0, 10] kWp");
    if (!in01(x.performance_ratio)) fail("performance ratio must be in [0, 1]");
    if (!in01(x.self_consumption)) fail("self-consumption ratio must be in [0, 1]");
    if (!in01(x.inclination_factor)) fail("inclination factor must be in [0, 1]");
    if (!(x.degradation >= 0.0 && x.degradation <= 0.02)) fail("degradation must be in [0, 0.02]/yr");
    if (x.lifetime_years != 20) fail("lifetime must be 20 years");
    for (double v : {x.specific_cost_eur_per_kwp, x.irradiance_kwh_per_m2_yr, x.om_share,
                     x.retail_price_eur_per_kwh, x.tariff_eur_per_kwh, x.sc_tariff_eur_per_kwh})
        if (!(std::isfinite(v) && v >= 0.0)) fail("costs, prices and tariffs must be finite and >= 0");
}

/// The full random-input model: one spec per sampled parameter.
struct ParameterSet {
    ParameterSpec size;
    ParameterSpec specific_cost;
    ParameterSpec performance_ratio;
    ParameterSpec self_consumption;
    ParameterSpec degradation;
    ParameterSpec inclination;
    ParameterSpec irradiance;
    ParameterSpec om_share;
    ParameterSpec retail_price;

    void validate() const {
        for (const auto* spec : ordered()) spec->validate();
    }

    std::array<const ParameterSpec*, 9> ordered() const {
        return {&size, &specific_cost, &performance_ratio, &self_consumption, &degradation,
                &inclination, &irradiance, &om_share, &retail_price};
    }

    ParameterSpec* by_name(const std::string& name) {
        for (auto* spec : {&size, &specific_cost, &performance_ratio, &self_consumption,
                           &degradation, &inclination, &irradiance, &om_share, &retail_price})
            if (spec->name == name) return spec;
        return nullptr;
    }
};

/// Default input distributions. Cost and retail price are series-driven
/// normals with relative spreads; the physical parameters are PERT betas.
inline ParameterSet default_parameter_set() {
    using K = ParameterSpec::Kind;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ParameterSet p;
    p.size = {"size", K::uniform, 0.0, 10.0, 0.0, false};
    p.specific_cost = {"specific_cost", K::normal, nan, 0.10, 0.0, true};
    p.performance_ratio = {"performance_ratio", K::beta_mmm, 0.75, 0.84, 0.90, false};
    p.self_consumption = {"self_consumption", K::beta_mmm, 0.0, 0.05, 0.20, false};
    p.degradation = {"degradation", K::beta_mmm, 0.0, 0.005, 0.02, false};
    p.inclination = {"inclination", K::beta_mmm, 0.25, 0.98, 1.00, false};
    p.irradiance = {"irradiance", K::beta_mmm, 1141.0, 1253.0, 1403.0, false};
    p.om_share = {"om_share", K::normal, 0.015, 0.0015, 0.0, false};
    p.retail_price = {"retail_price", K::normal, nan, 0.05, 0.0, true};
    return p;
}

/// Applies overrides from a "name,kind,p1,p2,p3" CSV. Kinds: constant,
/// uniform, normal, normal_rel, beta_mmm. For normal/normal_rel an empty or
/// "series" p1 keeps the mean series-driven.
inline void apply_parameter_overrides(ParameterSet& set, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw input_error(input_errc::io, "cannot open parameter file " + path.string());
    std::string line;
    size_t lineno = 0;
    bool saw_header = false, saw_row = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "name,kind,p1,p2,p3")
                throw input_error(input_errc::parse,
                                  path.string() + ": expected header 'name,kind,p1,p2,p3'");
            saw_header = true;
            continue;
        }
        saw_row = true;
        const std::string context = path.filename().string() + " line " + std::to_string(lineno);
        std::vector<std::string> fields;
        size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 5)
            throw input_error(input_errc::parse, "expected 5 fields in " + context);

        ParameterSpec* spec = set.by_name(fields[0]);
        if (!spec)
            throw input_error(input_errc::parse, "unknown parameter '" + fields[0] + "' in " + context);

        auto num = [&](const std::string& token, bool series_ok) {
            if (token.empty() || token == "series") {
                if (series_ok) return std::numeric_limits<double>::quiet_NaN();
                throw input_error(input_errc::parse, "missing numeric field in " + context);
            }
            return detail::parse_value(token, context);
        };

        const std::string& kind = fields[1];
        ParameterSpec next{spec->name, ParameterSpec::Kind::constant, 0, 0, 0, false};
        if (kind == "constant") {
            next.kind = ParameterSpec::Kind::constant;
            next.p1 = num(fields[2], false);
        } else if (kind == "uniform") {
            next.kind = ParameterSpec::Kind::uniform;
            next.p1 = num(fields[2], false);
            next.p2 = num(fields[3], false);
        } else if (kind == "normal" || kind == "normal_rel") {
            next.kind = ParameterSpec::Kind::normal;
            next.p1 = num(fields[2], true);
            next.p2 = num(fields[3], false);
            next.sd_relative = (kind == "normal_rel");
        } else if (kind == "beta_mmm") {
            next.kind = ParameterSpec::Kind::beta_mmm;
            next.p1 = num(fields[2], false);
            next.p2 = num(fields[3], false);
            next.p3 = num(fields[4], false);
        } else {
            throw input_error(input_errc::parse,
                              "unknown distribution kind '" + kind + "' in " + context +
                                  " (expected constant|uniform|normal|normal_rel|beta_mmm)");
        }
        next.validate();
        *spec = next;
    }
    if (!saw_header || !saw_row)
        throw input_error(input_errc::empty_input, "no parameter rows in " + path.string());
}

/// The month-dependent market inputs a sample is drawn against.
struct MarketSeries {
    const MonthlyTimeSeries& system_cost;    // Euro/kWp
    const MonthlyTimeSeries& retail_price;   // Euro/kWh
    const MonthlyTimeSeries& feed_in_tariff; // Euro/kWh
    const MonthlyTimeSeries& sc_tariff;      // Euro/kWh
};

namespace detail {

// Parameter-index layout for the per-sample streams.
enum : uint32_t {
    p_size = 0,
    p_cost = 1,
    p_pr = 2,
    p_sc = 3,
    p_degradation = 4,
    p_inclination = 5,
    p_irradiance = 6,
    p_om = 7,
    p_retail = 8,
};

} // namespace detail

/// Draws sample `index` for `month`. Pure function of
/// (seed, month, index, parameter set, market values).
inline SystemSample draw_sample(const ParameterSet& specs, MonthIndex month, const MarketSeries& market,
                                uint64_t seed, uint64_t index) {
    const long long mc = month.linear();
    auto stream = [&](uint32_t p) { return SampleStream(seed, mc, index, p); };
    const double nan = std::numeric_limits<double>::quiet_NaN();

    SystemSample x;
    {
        auto s = stream(detail::p_size);
        x.size_kwp = specs.size.draw(s, nan);
    }
    {
        auto s = stream(detail::p_cost);
        x.specific_cost_eur_per_kwp = specs.specific_cost.draw(s, market.system_cost.at(month));
    }
    {
        auto s = stream(detail::p_pr);
        x.performance_ratio = specs.performance_ratio.draw(s, nan);
    }
    {
        auto s = stream(detail::p_sc);
        x.self_consumption = specs.self_consumption.draw(s, nan);
    }
    {
        auto s = stream(detail::p_degradation);
        x.degradation = specs.degradation.draw(s, nan);
    }
    {
        auto s = stream(detail::p_inclination);
        x.inclination_factor = specs.inclination.draw(s, nan);
    }
    {
        auto s = stream(detail::p_irradiance);
        x.irradiance_kwh_per_m2_yr = specs.irradiance.draw(s, nan);
    }
    {
        auto s = stream(detail::p_om);
        x.om_share = specs.om_share.draw(s, nan);
    }
    {
        auto s = stream(detail::p_retail);
        x.retail_price_eur_per_kwh = specs.retail_price.draw(s, market.retail_price.at(month));
    }
    x.tariff_eur_per_kwh = market.feed_in_tariff.at(month);
    x.sc_tariff_eur_per_kwh = market.sc_tariff.at(month);
    x.lifetime_years = 20;
    validate_sample(x);
    return x;
}

/// Draws `n` samples for one month. Deterministic for a fixed seed no matter
/// how callers partition or reorder the index set.
inline std::vector<SystemSample> sample_population(const ParameterSet& specs, MonthIndex month,
                                                   const MarketSeries& market, size_t n, uint64_t seed) {
    if (n < 1)
        throw input_error(input_errc::bad_argument, "sample count must be >= 1");
    specs.validate();
    std::vector<SystemSample> out;
    out.reserve(n);
    for (uint64_t i = 0; i < n; ++i) out.push_back(draw_sample(specs, month, market, seed, i));
    return out;
}

} // namespace pvuptake
