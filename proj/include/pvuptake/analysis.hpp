#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "pvuptake/errors.hpp"
#include "pvuptake/irr.hpp"
#include "pvuptake/scenario.hpp"
#include "pvuptake/timeseries.hpp"
#include "pvuptake/uptake.hpp"

namespace pvuptake {

/// Sample Pearson correlation of two aligned series. Undefined (and an
/// error) when either side has zero variance or fewer than 3 months.
inline double pearson(const MonthlyTimeSeries& a, const MonthlyTimeSeries& b) {
    require_same_range(a, b, "pearson");
    const size_t n = a.size();
    if (n < 3)
        throw input_error(input_errc::bad_argument, "pearson needs at least 3 months");
    double mean_a = 0.0, mean_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0)
        throw input_error(input_errc::zero_variance,
                          "pearson is undefined on a constant series");
    return cov / std::sqrt(var_a * var_b);
}

/// Two-sided significance of a correlation via the t-transform
/// t = r * sqrt((n-2)/(1-r^2)) with n-2 degrees of freedom.
inline bool pearson_significant(double r, size_t n, double p_threshold = 0.001) {
    if (n < 3) return false;
    if (std::abs(r) >= 1.0) return true;
    const double df = static_cast<double>(n - 2);
    const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
    const boost::math::students_t dist(df);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
    return p < p_threshold;
}

/// Scale constant that matches total modeled deployment to total observed
/// deployment: sum(observed) / sum(max(utility, 0)) when clamping, else
/// sum(observed) / sum(utility).
inline double calibrate_scale(const MonthlyTimeSeries& utility, const MonthlyTimeSeries& observed,
                              bool clamp_negative) {
    require_same_range(utility, observed, "calibrate_scale");
    double total_utility = 0.0, total_observed = 0.0;
    for (size_t i = 0; i < utility.size(); ++i) {
        const double v = utility[i];
        total_utility += clamp_negative ? std::max(v, 0.0) : v;
        total_observed += observed[i];
    }
    if (!(total_utility > 0.0))
        throw input_error(input_errc::bad_argument,
                          "cannot calibrate: total utility is not positive");
    if (!(total_observed > 0.0))
        throw input_error(input_errc::bad_argument,
                          "cannot calibrate: total observed deployment is not positive");
    return total_observed / total_utility;
}

/// Calibration and goodness-of-fit summary of one model.
struct FitReport {
    std::string model;
    double scale = 0.0;
    double pearson_r = 0.0;
    bool significant = false; // p < 0.001
    double total_modeled = 0.0;
    double total_observed = 0.0;
};

namespace detail {

inline double series_sum(const MonthlyTimeSeries& s) {
    double total = 0.0;
    for (size_t i = 0; i < s.size(); ++i) total += s[i];
    return total;
}

inline double rmse(const MonthlyTimeSeries& a, const MonthlyTimeSeries& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

} // namespace detail

/// Exponential model: deployment proportional to u itself.
inline UptakeResult run_exponential_model(const MonthlyTimeSeries& pi, const BehavioralParams& params,
                                          const MonthlyTimeSeries& observed) {
    MonthlyTimeSeries u = exp_utility(pi, params.kappa);
    MonthlyTimeSeries big_u = prospect_utility(u, params);
    const double scale = calibrate_scale(u, observed, false);
    MonthlyTimeSeries d = deployment(u, scale, false);
    return UptakeResult{pi, std::move(u), std::move(big_u), std::move(d), scale};
}

/// Prospect model: deployment proportional to the positive part of U.
inline UptakeResult run_prospect_model(const MonthlyTimeSeries& pi, const BehavioralParams& params,
                                       const MonthlyTimeSeries& observed) {
    MonthlyTimeSeries u = exp_utility(pi, params.kappa);
    MonthlyTimeSeries big_u = prospect_utility(u, params);
    const double scale = calibrate_scale(big_u, observed, true);
    MonthlyTimeSeries d = deployment(big_u, scale, true);
    return UptakeResult{pi, std::move(u), std::move(big_u), std::move(d), scale};
}

inline FitReport fit_report(const std::string& model, const UptakeResult& r,
                            const MonthlyTimeSeries& observed) {
    FitReport f;
    f.model = model;
    f.scale = r.scale;
    f.pearson_r = pearson(r.d_model, observed);
    f.significant = pearson_significant(f.pearson_r, observed.size());
    f.total_modeled = detail::series_sum(r.d_model);
    f.total_observed = detail::series_sum(observed);
    return f;
}

/// Everything a full scenario run produces.
struct ScenarioResult {
    UptakeResult exponential;
    UptakeResult prospect;
    FitReport fit_exponential;
    FitReport fit_prospect;
    double mean_irr_pearson = 0.0;      // raw feature correlation
    double risk_adjusted_pearson = 0.0; // raw feature correlation
    double rmse_exponential = 0.0;
    double rmse_prospect = 0.0;
    MeanIrrSeries irr;
    MonthlyTimeSeries observed;
};

/// Runs both models on one shared mean-IRR series for an aligned dataset.
inline ScenarioResult run_scenario(const ScenarioConfig& config, const Dataset& data,
                                   unsigned threads = 0,
                                   std::vector<EconomicPotentialTable>* tables_out = nullptr) {
    config.validate();
    const Dataset aligned = align_dataset(data, config.start, config.end);
    MeanIrrSeries irr = mean_irr_series(config, aligned, threads, tables_out);
    MonthlyTimeSeries pi = risk_adjusted_irr(irr.mean, aligned.bond_yield);

    UptakeResult exponential = run_exponential_model(pi, config.behavioral, aligned.observed);
    UptakeResult prospect = run_prospect_model(pi, config.behavioral, aligned.observed);
    FitReport fit_e = fit_report("exponential", exponential, aligned.observed);
    FitReport fit_p = fit_report("prospect", prospect, aligned.observed);

    ScenarioResult out{std::move(exponential), std::move(prospect),    std::move(fit_e),
                       std::move(fit_p),       0.0,                    0.0,
                       0.0,                    0.0,                    std::move(irr),
                       aligned.observed};
    out.mean_irr_pearson = pearson(out.irr.mean, out.observed);
    out.risk_adjusted_pearson = pearson(out.prospect.pi, out.observed);
    out.rmse_exponential = detail::rmse(out.exponential.d_model, out.observed);
    out.rmse_prospect = detail::rmse(out.prospect.d_model, out.observed);
    return out;
}

/// Loads the dataset from config.data_dir and runs the scenario.
inline ScenarioResult run_scenario(const ScenarioConfig& config, unsigned threads = 0,
                                   std::vector<EconomicPotentialTable>* tables_out = nullptr) {
    return run_scenario(config, load_dataset(config.data_dir), threads, tables_out);
}

enum class SweepParameter { alpha, lambda, kappa };

inline std::string sweep_parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::alpha: return "alpha";
        case SweepParameter::lambda: return "lambda";
        case SweepParameter::kappa: return "kappa";
    }
    return "?";
}

inline SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "alpha") return SweepParameter::alpha;
    if (name == "lambda") return SweepParameter::lambda;
    if (name == "kappa") return SweepParameter::kappa;
    throw input_error(input_errc::bad_argument,
                      "unknown sweep parameter '" + name + "' (expected alpha, lambda or kappa)");
}

struct SweepPoint {
    double value = 0.0;
    MonthlyTimeSeries d_model;
    double pearson_r = 0.0;
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::alpha;
    std::vector<SweepPoint> points;
};

/// One prospect-model run per parameter value, each independently
/// recalibrated. The mean-IRR series does not depend on alpha, lambda or
/// kappa, so it is computed once and shared.
inline SweepResult sensitivity_sweep(const ScenarioConfig& config, const Dataset& data,
                                     SweepParameter parameter, std::vector<double> values,
                                     unsigned threads = 0) {
    config.validate();
    if (values.empty())
        throw input_error(input_errc::bad_argument, "sweep needs at least one value");
    for (size_t i = 1; i < values.size(); ++i)
        if (!(values[i - 1] < values[i]))
            throw input_error(input_errc::bad_argument, "sweep values must be strictly increasing");

    const Dataset aligned = align_dataset(data, config.start, config.end);
    const MeanIrrSeries irr = mean_irr_series(config, aligned, threads);
    const MonthlyTimeSeries pi = risk_adjusted_irr(irr.mean, aligned.bond_yield);

    SweepResult out{parameter, {}};
    out.points.reserve(values.size());
    for (double v : values) {
        BehavioralParams params = config.behavioral;
        switch (parameter) {
            case SweepParameter::alpha: params.alpha = v; break;
            case SweepParameter::lambda: params.lambda = v; break;
            case SweepParameter::kappa: params.kappa = v; break;
        }
        params.validate();
        UptakeResult r = run_prospect_model(pi, params, aligned.observed);
        const double corr = pearson(r.d_model, aligned.observed);
        out.points.push_back(SweepPoint{v, std::move(r.d_model), corr});
    }
    return out;
}

inline SweepResult sensitivity_sweep(const ScenarioConfig& config, SweepParameter parameter,
                                     std::vector<double> values, unsigned threads = 0) {
    return sensitivity_sweep(config, load_dataset(config.data_dir), parameter, std::move(values),
                             threads);
}

} // namespace pvuptake
