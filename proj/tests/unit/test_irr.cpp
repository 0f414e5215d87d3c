#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pvuptake/irr.hpp"
#include "pvuptake/scenario.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/test_util.hpp"

using namespace pvuptake;

namespace {

CashFlowProfile annuity_profile(double outlay, double flow) {
    return CashFlowProfile{outlay, std::vector<double>(20, flow)};
}

SystemSample deterministic_sample(double tariff, double cost) {
    SystemSample x;
    x.size_kwp = 5.0;
    x.specific_cost_eur_per_kwp = cost;
    x.performance_ratio = 0.84;
    x.self_consumption = 0.05;
    x.degradation = 0.005;
    x.inclination_factor = 0.98;
    x.irradiance_kwh_per_m2_yr = 1253.0;
    x.om_share = 0.015;
    x.retail_price_eur_per_kwh = 0.22;
    x.tariff_eur_per_kwh = tariff;
    x.sc_tariff_eur_per_kwh = 0.0;
    return x;
}

} // namespace

TEST_CASE("discount grid validates its shape") {
    DiscountGrid grid{};
    grid.validate();
    REQUIRE(grid.points() == 51);
    REQUIRE(grid.rate(0) == -0.10);
    REQUIRE_THAT(grid.rate(50), Catch::Matchers::WithinAbs(0.15, 1e-12));

    REQUIRE_THROWS_AS((DiscountGrid{0.1, 0.0, 0.005}.validate()), input_error);
    REQUIRE_THROWS_AS((DiscountGrid{0.0, 0.1, 0.0}.validate()), input_error);
    REQUIRE_THROWS_AS((DiscountGrid{0.0, 0.1, 0.003}.validate()), input_error);
    REQUIRE_THROWS_AS((DiscountGrid{-1.5, 0.1, 0.1}.validate()), input_error);
}

TEST_CASE("potential is 1 for free profitable systems and 0 for worthless ones") {
    const DiscountGrid grid{};
    std::vector<CashFlowProfile> free_systems(3, annuity_profile(0.0, 100.0));
    const auto ones = economic_potential(std::span<const CashFlowProfile>(free_systems), grid);
    for (double theta : ones.theta) REQUIRE(theta == 1.0);

    std::vector<CashFlowProfile> idle(4, annuity_profile(500.0, 0.0));
    const auto zeros = economic_potential(std::span<const CashFlowProfile>(idle), grid);
    for (double theta : zeros.theta) REQUIRE(theta == 0.0);

    REQUIRE_THROWS_AS(economic_potential(std::span<const CashFlowProfile>(), grid), input_error);
}

TEST_CASE("single-sample potential steps at the sample's root") {
    const DiscountGrid grid{};
    const std::vector<SystemSample> samples{deterministic_sample(0.36, 3000.0)};
    const auto profile = build_profile(samples[0]);
    const auto root = testutil::bisection_irr(profile, grid.r_min, grid.r_max);
    REQUIRE(root.has_value());
    REQUIRE(*root > 0.0);
    REQUIRE(*root < 0.15);

    const auto table = economic_potential(std::span<const SystemSample>(samples), grid);
    for (size_t k = 0; k < table.theta.size(); ++k) {
        if (grid.rate(k) < *root - 1e-9) REQUIRE(table.theta[k] == 1.0);
        if (grid.rate(k) > *root + 1e-9) REQUIRE(table.theta[k] == 0.0);
    }

    const auto density = irr_density(table);
    double total = 0.0;
    for (const auto& [r, mass] : density) {
        REQUIRE(mass >= 0.0);
        if (mass > 0.0) {
            REQUIRE(mass == 1.0);
            REQUIRE(r <= *root);
            REQUIRE(*root < r + grid.step + 1e-12);
        }
        total += mass;
    }
    REQUIRE(total == 1.0);

    const auto m = mean_irr(table);
    REQUIRE(m.captured_mass == 1.0);
    REQUIRE(std::abs(m.value - *root) < grid.step);
}

TEST_CASE("density splits mass between two distinct roots") {
    const DiscountGrid grid{};
    const std::vector<CashFlowProfile> profiles{
        annuity_profile(1000.0 * 16.3514, 1000.0), // root near 2%
        annuity_profile(1000.0 * 11.4699, 1000.0), // root near 6%
    };
    const auto r1 = testutil::bisection_irr(profiles[0], grid.r_min, grid.r_max);
    const auto r2 = testutil::bisection_irr(profiles[1], grid.r_min, grid.r_max);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());

    const auto table = economic_potential(std::span<const CashFlowProfile>(profiles), grid);
    const auto density = irr_density(table);
    std::vector<std::pair<double, double>> occupied;
    for (const auto& [r, mass] : density)
        if (mass > 0.0) occupied.emplace_back(r, mass);
    REQUIRE(occupied.size() == 2);
    REQUIRE(occupied[0].second == 0.5);
    REQUIRE(occupied[1].second == 0.5);

    const auto m = mean_irr(table);
    REQUIRE(m.captured_mass == 1.0);
    REQUIRE(std::abs(m.value - 0.5 * (*r1 + *r2)) < grid.step);
}

TEST_CASE("all-positive potential has no transitions and no captured mass") {
    const DiscountGrid grid{};
    std::vector<CashFlowProfile> free_systems(2, annuity_profile(0.0, 50.0));
    const auto table = economic_potential(std::span<const CashFlowProfile>(free_systems), grid);
    const auto m = mean_irr(table);
    REQUIRE(m.value == 0.0);
    REQUIRE(m.captured_mass == 0.0);
    REQUIRE(m.captured_mass < 0.99); // the diagnostic flags escaping mass
}

TEST_CASE("mixing two half populations reproduces the combined mean") {
    const auto data = testutil::constant_dataset(MonthIndex{2010, 1}, 3, {0.35, 0.0, 3000.0, 0.22, 0.02, 1.0});
    const auto specs = default_parameter_set();
    const DiscountGrid grid{};
    const auto population = sample_population(specs, MonthIndex{2010, 2}, data.market(), 2000, 11);

    const auto whole = economic_potential(std::span<const SystemSample>(population), grid);
    const auto first = economic_potential(
        std::span<const SystemSample>(population.data(), 1000), grid);
    const auto second = economic_potential(
        std::span<const SystemSample>(population.data() + 1000, 1000), grid);

    EconomicPotentialTable averaged{MonthIndex{2010, 2}, grid, {}};
    averaged.theta.resize(first.theta.size());
    for (size_t k = 0; k < averaged.theta.size(); ++k)
        averaged.theta[k] = 0.5 * (first.theta[k] + second.theta[k]);

    for (size_t k = 0; k < whole.theta.size(); ++k)
        REQUIRE_THAT(averaged.theta[k], Catch::Matchers::WithinAbs(whole.theta[k], 1e-12));
    REQUIRE_THAT(mean_irr(averaged).value, Catch::Matchers::WithinAbs(mean_irr(whole).value, 1e-12));
}

TEST_CASE("halving the grid step moves a single-sample mean by at most the coarse step") {
    const std::vector<SystemSample> samples{deterministic_sample(0.34, 3200.0)};
    const DiscountGrid coarse{};
    const DiscountGrid fine{-0.10, 0.15, 0.0025};
    const auto mc = mean_irr(economic_potential(std::span<const SystemSample>(samples), coarse));
    const auto mf = mean_irr(economic_potential(std::span<const SystemSample>(samples), fine));
    REQUIRE(mc.captured_mass == 1.0);
    REQUIRE(mf.captured_mass == 1.0);
    REQUIRE(std::abs(mf.value - mc.value) <= coarse.step + 1e-12);
}

TEST_CASE("theta stays monotone on sampled populations") {
    const auto data = testutil::constant_dataset(MonthIndex{2012, 1}, 1, {0.19, 0.0, 2000.0, 0.25, 0.015, 1.0});
    const auto specs = default_parameter_set();
    const auto population = sample_population(specs, MonthIndex{2012, 1}, data.market(), 5000, 3);
    const auto table = economic_potential(std::span<const SystemSample>(population), DiscountGrid{});
    for (size_t k = 1; k < table.theta.size(); ++k) REQUIRE(table.theta[k] <= table.theta[k - 1]);
}

namespace {

ScenarioConfig degenerate_config(const testutil::TempDir& dir, size_t n_samples = 1) {
    testutil::write_file(dir.file("parameters.csv"), testutil::degenerate_parameters_csv());
    ScenarioConfig config;
    config.n_samples = n_samples;
    config.seed = 5;
    config.parameter_file = dir.file("parameters.csv");
    return config;
}

} // namespace

TEST_CASE("constant inputs with degenerate specs give a constant mean IRR") {
    testutil::TempDir dir;
    const auto config = degenerate_config(dir);
    const auto data = testutil::constant_dataset(MonthIndex{2010, 1}, 3);
    const auto series = mean_irr_series(config, data, 1);
    REQUIRE(series.mean.size() == 3);
    REQUIRE(series.mean[0] == series.mean[1]);
    REQUIRE(series.mean[1] == series.mean[2]);
    REQUIRE(series.captured_mass[0] == 1.0);
}

TEST_CASE("a tariff cut strictly lowers the mean IRR at the cut month") {
    testutil::TempDir dir;
    const auto config = degenerate_config(dir);
    const size_t cut = 6;
    const auto data = testutil::fit_step_dataset(MonthIndex{2010, 1}, 12, cut, 0.43, 0.30);
    const auto series = mean_irr_series(config, data, 1);
    REQUIRE(series.mean[cut] < series.mean[cut - 1]);
}

TEST_CASE("per-month series agrees with an explicit population run") {
    const auto data = testutil::constant_dataset(MonthIndex{2011, 1}, 4, {0.30, 0.0, 2800.0, 0.24, 0.025, 1.0});
    const auto specs = default_parameter_set();
    const DiscountGrid grid{};
    constexpr size_t n = 3000;
    constexpr uint64_t seed = 21;

    const auto series = mean_irr_series(specs, MonthIndex{2011, 1}, MonthIndex{2011, 4}, data.market(),
                                        n, seed, grid, 1);
    for (int i = 0; i < 4; ++i) {
        const auto month = MonthIndex{2011, 1}.plus_months(i);
        const auto population = sample_population(specs, month, data.market(), n, seed);
        const auto table = economic_potential(std::span<const SystemSample>(population), grid, month);
        const auto m = mean_irr(table);
        REQUIRE(series.mean[static_cast<size_t>(i)] == m.value);
        REQUIRE(series.captured_mass[static_cast<size_t>(i)] == m.captured_mass);
    }
}

TEST_CASE("worker count does not change the series") {
    const auto data = testutil::constant_dataset(MonthIndex{2011, 1}, 8, {0.30, 0.0, 2800.0, 0.24, 0.025, 1.0});
    const auto specs = default_parameter_set();
    const auto one = mean_irr_series(specs, MonthIndex{2011, 1}, MonthIndex{2011, 8}, data.market(),
                                     500, 9, DiscountGrid{}, 1);
    const auto many = mean_irr_series(specs, MonthIndex{2011, 1}, MonthIndex{2011, 8}, data.market(),
                                      500, 9, DiscountGrid{}, 4);
    for (size_t i = 0; i < one.mean.size(); ++i) {
        REQUIRE(one.mean[i] == many.mean[i]);
        REQUIRE(one.captured_mass[i] == many.captured_mass[i]);
    }
}

TEST_CASE("series computation reports coverage problems") {
    const auto data = testutil::constant_dataset(MonthIndex{2011, 1}, 4);
    const auto specs = default_parameter_set();
    REQUIRE_THROWS_AS(mean_irr_series(specs, MonthIndex{2011, 1}, MonthIndex{2011, 6}, data.market(),
                                      10, 1, DiscountGrid{}, 1),
                      input_error);
}

TEST_CASE("bundled dataset mean IRR matches the committed reference") {
    const auto golden_path = std::filesystem::path(PVUPTAKE_GOLDEN_DIR) / "mean_irr_n2000_seed42.csv";
    REQUIRE(std::filesystem::exists(golden_path));

    ScenarioConfig config;
    config.data_dir = PVUPTAKE_DATA_DIR;
    config.n_samples = 2000;
    config.seed = 42;
    const auto data = align_dataset(load_dataset(config.data_dir));
    const auto series = mean_irr_series(config, data, 0);

    const auto rows = testutil::read_csv(golden_path);
    REQUIRE(rows.size() == series.mean.size() + 1);
    REQUIRE(rows[0][0] == "month");
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto month = MonthIndex::parse(rows[i][0]);
        REQUIRE(month == series.mean.first().plus_months(static_cast<int>(i - 1)));
        const double expected_mean = std::stod(rows[i][1]);
        const double expected_mass = std::stod(rows[i][2]);
        REQUIRE_THAT(series.mean[i - 1], Catch::Matchers::WithinAbs(expected_mean, 1e-12));
        REQUIRE_THAT(series.captured_mass[i - 1], Catch::Matchers::WithinAbs(expected_mass, 1e-12));
    }
}
