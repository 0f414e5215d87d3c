#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pvuptake/errors.hpp"
#include "pvuptake/timeseries.hpp"

namespace pvuptake {

/// Behavioral constants of the uptake model: kappa scales the exponential
/// utility of the risk-adjusted return, alpha and lambda parametrize the
/// prospect-theory value function (saturation and loss aversion).
struct BehavioralParams {
    double kappa = 20.0;
    double alpha = 0.88;
    double lambda = 2.25;

    void validate() const {
        if (!(kappa > 0.0))
            throw input_error(input_errc::bad_argument, "kappa must be > 0");
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw input_error(input_errc::bad_argument, "alpha must be in (0, 1]");
        if (!(lambda >= 1.0))
            throw input_error(input_errc::bad_argument, "lambda must be >= 1");
    }
};

/// Risk-adjusted IRR: mean IRR minus the risk-free bond yield, elementwise.
inline MonthlyTimeSeries risk_adjusted_irr(const MonthlyTimeSeries& mean_irr,
                                           const MonthlyTimeSeries& bond_yield) {
    require_same_range(mean_irr, bond_yield, "risk_adjusted_irr");
    require_unit(mean_irr, Unit::fraction, "mean IRR");
    require_unit(bond_yield, Unit::fraction, "bond yield");
    std::vector<double> values(mean_irr.size());
    for (size_t i = 0; i < values.size(); ++i) values[i] = mean_irr[i] - bond_yield[i];
    return MonthlyTimeSeries(mean_irr.first(), std::move(values), Unit::fraction);
}

/// Exponential utility u(t) = exp(kappa * pi(t)).
inline MonthlyTimeSeries exp_utility(const MonthlyTimeSeries& pi, double kappa) {
    if (!(kappa > 0.0))
        throw input_error(input_errc::bad_argument, "kappa must be > 0");
    require_unit(pi, Unit::fraction, "risk-adjusted IRR");
    std::vector<double> values(pi.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const double arg = kappa * pi[i];
        if (std::abs(arg) > 50.0)
            throw input_error(input_errc::bad_argument,
                              "kappa * pi = " + format_double(arg) + " at " +
                                  pi.first().plus_months(static_cast<int>(i)).str() +
                                  " is outside the supported range [-50, 50]");
        values[i] = std::exp(arg);
    }
    return MonthlyTimeSeries(pi.first(), std::move(values), Unit::dimensionless);
}

/// Prospect-theory value of a relative gain (x > 0) or loss (x <= 0):
/// x^alpha for gains, -lambda * (-x)^alpha for losses.
inline double value_function(double x, const BehavioralParams& params) {
    params.validate();
    if (x > 0.0) return std::pow(x, params.alpha);
    return -params.lambda * std::pow(-x, params.alpha);
}

/// Prospect utility U(t) = u(t) - v(u(t+1) - u(t)) + v(u(t) - u(t-1)).
/// The anticipated loss of next month's utility raises today's incentive to
/// build; a drop against last month depresses it. At the range boundaries
/// the missing neighbor's change is taken as zero, so U equals u there.
inline MonthlyTimeSeries prospect_utility(const MonthlyTimeSeries& u, const BehavioralParams& params) {
    params.validate();
    if (u.size() < 2)
        throw input_error(input_errc::bad_argument, "prospect utility needs at least 2 months");
    std::vector<double> values(u.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const double forward = (i + 1 < u.size()) ? u[i + 1] - u[i] : 0.0;
        const double backward = (i > 0) ? u[i] - u[i - 1] : 0.0;
        values[i] = u[i] - value_function(forward, params) + value_function(backward, params);
    }
    return MonthlyTimeSeries(u.first(), std::move(values), Unit::dimensionless);
}

/// Deployment proportional to a utility series. With clamp_negative the
/// negative part maps to zero (prospect model); without it the series is
/// scaled as-is (exponential model, whose utility is always positive).
inline MonthlyTimeSeries deployment(const MonthlyTimeSeries& utility, double scale,
                                    bool clamp_negative) {
    if (!(scale > 0.0))
        throw input_error(input_errc::bad_argument, "deployment scale must be > 0");
    std::vector<double> values(utility.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const double v = utility[i];
        values[i] = clamp_negative ? (v > 0.0 ? scale * v : 0.0) : scale * v;
    }
    return MonthlyTimeSeries(utility.first(), std::move(values), Unit::count);
}

/// Everything one model run produces for a scenario range.
struct UptakeResult {
    MonthlyTimeSeries pi;         // risk-adjusted IRR, fraction
    MonthlyTimeSeries exp_u;      // exponential utility u
    MonthlyTimeSeries prospect_u; // prospect utility U
    MonthlyTimeSeries d_model;    // modeled deployment, count
    double scale = 0.0;           // calibration constant (c or k)
};

} // namespace pvuptake
