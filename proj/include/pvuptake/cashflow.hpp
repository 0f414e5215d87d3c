#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pvuptake/errors.hpp"
#include "pvuptake/sampling.hpp"
#include "pvuptake/timeseries.hpp"

namespace pvuptake {

/// Project economics of one system: initial outlay plus the net cash flow of
/// each operating year.
struct CashFlowProfile {
    double initial_outlay = 0.0;   // C0, Euro
    std::vector<double> net_flows; // Euro per year, years 1..lifetime

    void validate() const {
        if (net_flows.size() != 20)
            throw input_error(input_errc::bad_argument, "cash-flow profile must cover exactly 20 years");
        if (!(initial_outlay >= 0.0))
            throw input_error(input_errc::bad_argument, "initial outlay must be >= 0");
    }
};

/// Size-scaled initial investment: s * I0 * (s / 10 kWp)^-0.063. Smaller
/// systems pay a higher specific price.
inline double investment_cost(double size_kwp, double i0_eur_per_kwp) {
    if (!(size_kwp > 0.0) || size_kwp > 10.0)
        throw input_error(input_errc::bad_argument, "system size must be in (0, 10] kWp");
    if (!(i0_eur_per_kwp > 0.0))
        throw input_error(input_errc::bad_argument, "specific cost must be > 0");
    return size_kwp * i0_eur_per_kwp * std::pow(size_kwp / 10.0, -0.063);
}

/// Energy output in year n: s * gamma * PR * H_opt * (1 - d)^n. Degradation
/// applies from year 1 onward.
inline double annual_energy(const SystemSample& x, int year) {
    if (year < 1 || year > x.lifetime_years)
        throw input_error(input_errc::bad_argument,
                          "year index must be in [1, " + std::to_string(x.lifetime_years) + "]");
    return x.size_kwp * x.inclination_factor * x.performance_ratio * x.irradiance_kwh_per_m2_yr *
           std::pow(1.0 - x.degradation, year);
}

/// Revenue for one year's energy. When the feed-in tariff beats the
/// self-consumption alternative (retail price plus the self-consumption
/// tariff), everything is fed in; otherwise the self-consumed share earns
/// the alternative rate.
inline double positive_cash_flow(const SystemSample& x, double energy_kwh) {
    if (!(energy_kwh >= 0.0))
        throw input_error(input_errc::bad_argument, "energy must be >= 0");
    const double alternative = x.retail_price_eur_per_kwh + x.sc_tariff_eur_per_kwh;
    if (x.tariff_eur_per_kwh > alternative) return energy_kwh * x.tariff_eur_per_kwh;
    // f*(1-SC) + (e+f_SC)*SC, written so the two branches agree exactly at
    // the boundary f == e + f_SC.
    return energy_kwh *
           (x.tariff_eur_per_kwh + x.self_consumption * (alternative - x.tariff_eur_per_kwh));
}

/// Full profile of one sample: outlay plus yearly revenue net of the fixed
/// O&M share of the initial investment.
inline CashFlowProfile build_profile(const SystemSample& x) {
    CashFlowProfile p;
    p.initial_outlay = investment_cost(x.size_kwp, x.specific_cost_eur_per_kwp);
    const double om_cost = p.initial_outlay * x.om_share;
    p.net_flows.resize(static_cast<size_t>(x.lifetime_years));
    for (int n = 1; n <= x.lifetime_years; ++n)
        p.net_flows[static_cast<size_t>(n - 1)] = positive_cash_flow(x, annual_energy(x, n)) - om_cost;
    return p;
}

/// Net present value at discount rate r: -C0 + sum of net_flows[n]/(1+r)^n.
inline double npv(const CashFlowProfile& p, double discount_rate) {
    if (!(discount_rate > -1.0))
        throw input_error(input_errc::bad_argument, "discount rate must be > -1");
    const double x = 1.0 / (1.0 + discount_rate);
    double acc = 0.0;
    for (size_t n = p.net_flows.size(); n-- > 0;) acc = (acc + p.net_flows[n]) * x;
    return acc - p.initial_outlay;
}

} // namespace pvuptake
