#pragma once

// In-memory scenario datasets and degenerate (all-constant) parameter
// tables used by the structural tests, where Monte Carlo spread would only
// blur the effect under test.

#include <string>
#include <vector>

#include "pvuptake/scenario.hpp"
#include "support/test_util.hpp"

namespace testutil {

using pvuptake::Dataset;
using pvuptake::MonthIndex;
using pvuptake::MonthlyTimeSeries;
using pvuptake::Unit;

inline MonthlyTimeSeries constant_series(MonthIndex start, size_t n, double value, Unit unit) {
    return MonthlyTimeSeries(start, std::vector<double>(n, value), unit);
}

/// Series equal to `before` for indices < cut_index and `after` from there on.
inline MonthlyTimeSeries step_series(MonthIndex start, size_t n, size_t cut_index, double before,
                                     double after, Unit unit) {
    std::vector<double> v(n, before);
    for (size_t i = cut_index; i < n; ++i) v[i] = after;
    return MonthlyTimeSeries(start, std::move(v), unit);
}

struct SyntheticLevels {
    double fit = 0.40;
    double sc_fit = 0.0;
    double cost = 3000.0;
    double retail = 0.22;
    double bond = 0.02;
    double observed = 1000.0;
};

inline Dataset constant_dataset(MonthIndex start, size_t n, const SyntheticLevels& lv = {}) {
    return Dataset{
        constant_series(start, n, lv.fit, Unit::eur_per_kwh),
        constant_series(start, n, lv.sc_fit, Unit::eur_per_kwh),
        constant_series(start, n, lv.cost, Unit::eur_per_kwp),
        constant_series(start, n, lv.retail, Unit::eur_per_kwh),
        constant_series(start, n, lv.bond, Unit::fraction),
        constant_series(start, n, lv.observed, Unit::count),
    };
}

/// Constant market except for one tariff step-down at cut_index. The
/// observed series carries a pre-cut spike and post-cut dip so that fit
/// statistics stay well-defined.
inline Dataset fit_step_dataset(MonthIndex start, size_t n, size_t cut_index, double fit_before,
                                double fit_after, const SyntheticLevels& lv = {}) {
    std::vector<double> observed(n, 1000.0);
    for (size_t i = cut_index; i < n; ++i) observed[i] = 650.0;
    if (cut_index >= 1) observed[cut_index - 1] = 2400.0;
    observed[cut_index] = 350.0;
    return Dataset{
        step_series(start, n, cut_index, fit_before, fit_after, Unit::eur_per_kwh),
        constant_series(start, n, lv.sc_fit, Unit::eur_per_kwh),
        constant_series(start, n, lv.cost, Unit::eur_per_kwp),
        constant_series(start, n, lv.retail, Unit::eur_per_kwh),
        constant_series(start, n, lv.bond, Unit::fraction),
        MonthlyTimeSeries(start, std::move(observed), Unit::count),
    };
}

/// Constant market with a bond-yield step, which moves the risk-adjusted
/// return between two exact levels without touching the Monte Carlo inputs.
inline Dataset bond_step_dataset(MonthIndex start, size_t n, size_t cut_index, double bond_low,
                                 double bond_high, const SyntheticLevels& lv = {}) {
    std::vector<double> observed(n);
    for (size_t i = 0; i < n; ++i) observed[i] = 1000.0 + 40.0 * static_cast<double>(i % 5);
    return Dataset{
        constant_series(start, n, lv.fit, Unit::eur_per_kwh),
        constant_series(start, n, lv.sc_fit, Unit::eur_per_kwh),
        constant_series(start, n, lv.cost, Unit::eur_per_kwp),
        constant_series(start, n, lv.retail, Unit::eur_per_kwh),
        step_series(start, n, cut_index, bond_low, bond_high, Unit::fraction),
        MonthlyTimeSeries(start, std::move(observed), Unit::count),
    };
}

/// parameters.csv content that pins every sampled input to its modal value
/// (series-driven means keep sd = 0), making runs fully deterministic.
inline std::string degenerate_parameters_csv() {
    return "name,kind,p1,p2,p3\n"
           "size,constant,5,,\n"
           "specific_cost,normal,series,0,\n"
           "performance_ratio,constant,0.84,,\n"
           "self_consumption,constant,0.05,,\n"
           "degradation,constant,0.005,,\n"
           "inclination,constant,0.98,,\n"
           "irradiance,constant,1253,,\n"
           "om_share,constant,0.015,,\n"
           "retail_price,normal,series,0,\n";
}

/// Writes a dataset to CSV files in `dir` so CLI paths can run on it.
inline void write_dataset(const std::filesystem::path& dir, const Dataset& d) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto series = d.all();
    for (size_t i = 0; i < series.size(); ++i)
        pvuptake::write_series(dir / pvuptake::dataset_files[i], *series[i]);
}

} // namespace testutil
