#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pvuptake/cashflow.hpp"
#include "pvuptake/errors.hpp"
#include "pvuptake/sampling.hpp"
#include "pvuptake/timeseries.hpp"

namespace pvuptake {

/// Evenly spaced discount rates; the default spans -10% to +15% in 0.5%
/// steps (51 rates).
struct DiscountGrid {
    double r_min = -0.10;
    double r_max = 0.15;
    double step = 0.005;

    void validate() const {
        if (!(step > 0.0))
            throw input_error(input_errc::bad_argument, "grid step must be > 0");
        if (!(r_min < r_max))
            throw input_error(input_errc::bad_argument, "grid requires r_min < r_max");
        if (!(r_min > -1.0))
            throw input_error(input_errc::bad_argument, "grid rates must stay > -1");
        const double steps = (r_max - r_min) / step;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            throw input_error(input_errc::bad_argument,
                              "grid span must be an integer number of steps");
    }

    size_t points() const {
        return static_cast<size_t>(std::llround((r_max - r_min) / step)) + 1;
    }

    double rate(size_t k) const { return r_min + static_cast<double>(k) * step; }

    std::vector<double> rates() const {
        std::vector<double> out(points());
        for (size_t k = 0; k < out.size(); ++k) out[k] = rate(k);
        return out;
    }
};

/// Share of positive-NPV samples per discount rate for one month.
/// theta[k] belongs to grid.rate(k) and is non-increasing in k.
struct EconomicPotentialTable {
    MonthIndex month;
    DiscountGrid grid;
    std::vector<double> theta;
};

namespace detail {

inline EconomicPotentialTable finish_table(MonthIndex month, const DiscountGrid& grid,
                                           const std::vector<uint64_t>& positive_counts, uint64_t n) {
    for (size_t k = 1; k < positive_counts.size(); ++k)
        if (positive_counts[k] > positive_counts[k - 1])
            throw internal_error("economic potential is not non-increasing in the discount rate at " +
                                 month.str() + " (rate " + format_double(grid.rate(k)) + ")");
    EconomicPotentialTable t{month, grid, {}};
    t.theta.resize(positive_counts.size());
    for (size_t k = 0; k < positive_counts.size(); ++k)
        t.theta[k] = static_cast<double>(positive_counts[k]) / static_cast<double>(n);
    return t;
}

} // namespace detail

/// Economic potential of explicit cash-flow profiles: Theta(r) is the share
/// of profiles with NPV(r) strictly positive (NPV == 0 counts as rejection).
inline EconomicPotentialTable economic_potential(std::span<const CashFlowProfile> profiles,
                                                 const DiscountGrid& grid, MonthIndex month = {}) {
    grid.validate();
    if (profiles.empty())
        throw input_error(input_errc::empty_input, "economic potential needs at least one sample");
    const auto rates = grid.rates();
    std::vector<uint64_t> counts(rates.size(), 0);
    for (const auto& p : profiles) {
        p.validate();
        for (size_t k = 0; k < rates.size(); ++k)
            if (npv(p, rates[k]) > 0.0) ++counts[k];
    }
    return detail::finish_table(month, grid, counts, profiles.size());
}

/// Economic potential of drawn samples (profiles are built once per sample
/// and discounted at every grid rate).
inline EconomicPotentialTable economic_potential(std::span<const SystemSample> samples,
                                                 const DiscountGrid& grid, MonthIndex month = {}) {
    grid.validate();
    if (samples.empty())
        throw input_error(input_errc::empty_input, "economic potential needs at least one sample");
    const auto rates = grid.rates();
    std::vector<uint64_t> counts(rates.size(), 0);
    for (const auto& x : samples) {
        const CashFlowProfile p = build_profile(x);
        for (size_t k = 0; k < rates.size(); ++k)
            if (npv(p, rates[k]) > 0.0) ++counts[k];
    }
    return detail::finish_table(month, grid, counts, samples.size());
}

/// Probability mass of IRRs per grid cell: mass at rate r_k is
/// Theta(r_k) - Theta(r_k + step), assigned to the cell's lower edge.
inline std::vector<std::pair<double, double>> irr_density(const EconomicPotentialTable& t) {
    std::vector<std::pair<double, double>> out;
    if (t.theta.size() < 2) return out;
    out.reserve(t.theta.size() - 1);
    for (size_t k = 0; k + 1 < t.theta.size(); ++k)
        out.emplace_back(t.grid.rate(k), t.theta[k] - t.theta[k + 1]);
    return out;
}

struct MeanIrr {
    double value = 0.0;         // sum of r * mass over the grid
    double captured_mass = 0.0; // Theta(r_min) - Theta(r_max); < 1 means IRRs escaped the grid
};

/// Stepwise mean IRR from the potential table. captured_mass below ~0.99
/// signals that a noticeable share of IRRs lies outside the grid.
inline MeanIrr mean_irr(const EconomicPotentialTable& t) {
    MeanIrr out;
    for (const auto& [r, mass] : irr_density(t)) {
        out.value += r * mass;
        out.captured_mass += mass;
    }
    return out;
}

/// Mean IRR and captured-mass diagnostics per month over a scenario range.
struct MeanIrrSeries {
    MonthlyTimeSeries mean;          // Unit::fraction
    MonthlyTimeSeries captured_mass; // Unit::fraction
};

/// Computes the per-month economic potential and mean IRR for every month in
/// [first, last]. Months are independent and distributed over `threads`
/// workers (0 = hardware concurrency); the result does not depend on the
/// partitioning. Optionally retains each month's potential table.
inline MeanIrrSeries mean_irr_series(const ParameterSet& specs, MonthIndex first, MonthIndex last,
                                     const MarketSeries& market, size_t n_samples, uint64_t seed,
                                     const DiscountGrid& grid, unsigned threads = 0,
                                     std::vector<EconomicPotentialTable>* tables_out = nullptr) {
    grid.validate();
    specs.validate();
    if (n_samples < 1)
        throw input_error(input_errc::bad_argument, "sample count must be >= 1");
    if (first > last)
        throw input_error(input_errc::bad_argument, "scenario range is empty");
    for (const MonthlyTimeSeries* s :
         {&market.system_cost, &market.retail_price, &market.feed_in_tariff, &market.sc_tariff})
        if (!s->covers(first, last))
            throw input_error(input_errc::coverage,
                              "series " + s->range_str() + " does not cover scenario range [" +
                                  first.str() + ", " + last.str() + "]");

    const size_t n_months = static_cast<size_t>(months_between(first, last)) + 1;
    const auto rates = grid.rates();

    std::vector<double> means(n_months), captured(n_months);
    if (tables_out) tables_out->assign(n_months, EconomicPotentialTable{});

    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        try {
            for (;;) {
                const size_t idx = next.fetch_add(1);
                if (idx >= n_months) return;
                const MonthIndex month = first.plus_months(static_cast<int>(idx));
                std::vector<uint64_t> counts(rates.size(), 0);
                for (uint64_t i = 0; i < n_samples; ++i) {
                    const SystemSample x = draw_sample(specs, month, market, seed, i);
                    const CashFlowProfile p = build_profile(x);
                    for (size_t k = 0; k < rates.size(); ++k)
                        if (npv(p, rates[k]) > 0.0) ++counts[k];
                }
                auto table = detail::finish_table(month, grid, counts, n_samples);
                const MeanIrr m = mean_irr(table);
                means[idx] = m.value;
                captured[idx] = m.captured_mass;
                if (tables_out) (*tables_out)[idx] = std::move(table);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(n_months);
        }
    };

    unsigned n_threads = threads ? threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = static_cast<unsigned>(std::min<size_t>(n_threads, n_months));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    return MeanIrrSeries{MonthlyTimeSeries(first, std::move(means), Unit::fraction),
                         MonthlyTimeSeries(first, std::move(captured), Unit::fraction)};
}

} // namespace pvuptake
