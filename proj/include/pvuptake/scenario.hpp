#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pvuptake/errors.hpp"
#include "pvuptake/irr.hpp"
#include "pvuptake/sampling.hpp"
#include "pvuptake/timeseries.hpp"
#include "pvuptake/uptake.hpp"

namespace pvuptake {

/// The six input series a scenario runs on. All series share one range once
/// aligned; `aligned()` tells which state an instance is in.
struct Dataset {
    MonthlyTimeSeries feed_in_tariff; // Euro/kWh
    MonthlyTimeSeries sc_tariff;      // Euro/kWh, 0 outside the self-consumption-tariff window
    MonthlyTimeSeries system_cost;    // Euro/kWp
    MonthlyTimeSeries retail_price;   // Euro/kWh
    MonthlyTimeSeries bond_yield;     // fraction
    MonthlyTimeSeries observed;       // installations per month

    std::vector<const MonthlyTimeSeries*> all() const {
        return {&feed_in_tariff, &sc_tariff, &system_cost, &retail_price, &bond_yield, &observed};
    }

    MarketSeries market() const { return {system_cost, retail_price, feed_in_tariff, sc_tariff}; }

    bool aligned() const {
        for (const auto* s : all())
            if (s->first() != feed_in_tariff.first() || s->size() != feed_in_tariff.size()) return false;
        return true;
    }
};

/// File names expected inside a data directory.
inline const char* const dataset_files[6] = {
    "feed_in_tariff.csv", "fit_self_consumption.csv", "system_cost.csv",
    "retail_price.csv",   "bond_yield.csv",           "observed_deployment.csv",
};

/// Loads the six CSVs. The system-cost file may contain sparse (for example
/// quarterly) anchors; it is linearly interpolated to months. Everything
/// else must be strictly monthly.
inline Dataset load_dataset(const std::filesystem::path& dir) {
    auto file = [&](const char* name) {
        const auto path = dir / name;
        if (!std::filesystem::exists(path))
            throw input_error(input_errc::io, "missing input file " + path.string());
        return path;
    };
    auto cost_anchors = load_anchors(file("system_cost.csv"));
    MonthlyTimeSeries cost = cost_anchors.size() == 1
                                 ? MonthlyTimeSeries(cost_anchors[0].first, {cost_anchors[0].second},
                                                     Unit::eur_per_kwp)
                                 : interpolate_to_monthly(cost_anchors, Unit::eur_per_kwp);
    return Dataset{
        load_series(file("feed_in_tariff.csv"), Unit::eur_per_kwh),
        load_series(file("fit_self_consumption.csv"), Unit::eur_per_kwh),
        std::move(cost),
        load_series(file("retail_price.csv"), Unit::eur_per_kwh),
        load_series(file("bond_yield.csv"), Unit::fraction),
        load_series(file("observed_deployment.csv"), Unit::count),
    };
}

/// Restricts every series to the common range, or to [start, end] when
/// given. A requested range that is not fully covered is a coverage error.
inline Dataset align_dataset(const Dataset& d, std::optional<MonthIndex> start = {},
                             std::optional<MonthIndex> end = {}) {
    const auto ptrs = d.all();
    AlignedRange common = align(std::span<const MonthlyTimeSeries* const>(ptrs.data(), ptrs.size()));
    MonthIndex lo = start.value_or(common.first);
    MonthIndex hi = end.value_or(common.last);
    if (lo > hi)
        throw input_error(input_errc::bad_argument,
                          "scenario start " + lo.str() + " is after end " + hi.str());
    if (lo < common.first || hi > common.last)
        throw input_error(input_errc::coverage,
                          "requested range [" + lo.str() + ", " + hi.str() +
                              "] is not covered by the common data range [" + common.first.str() +
                              ", " + common.last.str() + "]");
    return Dataset{
        common.series[0].slice(lo, hi), common.series[1].slice(lo, hi),
        common.series[2].slice(lo, hi), common.series[3].slice(lo, hi),
        common.series[4].slice(lo, hi), common.series[5].slice(lo, hi),
    };
}

/// A complete, reproducible run definition.
struct ScenarioConfig {
    std::filesystem::path data_dir;
    std::optional<MonthIndex> start; // empty = common data range
    std::optional<MonthIndex> end;
    size_t n_samples = 100000;
    uint64_t seed = 42;
    DiscountGrid grid{};
    BehavioralParams behavioral{};
    std::filesystem::path out_dir = "out";
    std::optional<std::filesystem::path> parameter_file; // optional distribution overrides CSV

    void validate() const {
        if (n_samples < 1)
            throw input_error(input_errc::bad_argument, "sample count must be >= 1");
        grid.validate();
        behavioral.validate();
        if (start && end && *start > *end)
            throw input_error(input_errc::bad_argument, "scenario start is after end");
    }

    ParameterSet parameter_set() const {
        ParameterSet specs = default_parameter_set();
        if (parameter_file) apply_parameter_overrides(specs, *parameter_file);
        specs.validate();
        return specs;
    }
};

/// Mean IRR and captured mass per month for an aligned dataset.
inline MeanIrrSeries mean_irr_series(const ScenarioConfig& config, const Dataset& aligned,
                                     unsigned threads = 0,
                                     std::vector<EconomicPotentialTable>* tables_out = nullptr) {
    config.validate();
    return mean_irr_series(config.parameter_set(), aligned.feed_in_tariff.first(),
                           aligned.feed_in_tariff.last(), aligned.market(), config.n_samples,
                           config.seed, config.grid, threads, tables_out);
}

} // namespace pvuptake
