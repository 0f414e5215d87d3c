#pragma once

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvuptake/analysis.hpp"
#include "pvuptake/errors.hpp"
#include "pvuptake/scenario.hpp"

namespace pvuptake::cli {

using ordered_json = nlohmann::ordered_json;

struct Options {
    ScenarioConfig config;
    unsigned threads = 0;
    bool density = false;
    std::string sweep_parameter;
    std::vector<double> sweep_values;
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error(input_errc::io, "cannot write " + path.string());
    return out;
}

inline void write_mean_irr_csv(const std::filesystem::path& path, const MeanIrrSeries& irr) {
    auto out = open_out(path);
    out << "month,mean_irr,captured_mass\n";
    for (size_t i = 0; i < irr.mean.size(); ++i)
        out << irr.mean.first().plus_months(static_cast<int>(i)).str() << ','
            << format_double(irr.mean[i]) << ',' << format_double(irr.captured_mass[i]) << '\n';
}

inline void write_uptake_csv(const std::filesystem::path& path, const ScenarioResult& r) {
    auto out = open_out(path);
    out << "month,pi,u,U,d_model,d_observed\n";
    const auto& p = r.prospect;
    for (size_t i = 0; i < p.pi.size(); ++i)
        out << p.pi.first().plus_months(static_cast<int>(i)).str() << ',' << format_double(p.pi[i])
            << ',' << format_double(p.exp_u[i]) << ',' << format_double(p.prospect_u[i]) << ','
            << format_double(p.d_model[i]) << ',' << format_double(r.observed[i]) << '\n';
}

inline void write_fit_report_csv(const std::filesystem::path& path, const ScenarioResult& r) {
    auto out = open_out(path);
    out << "model,scale,pearson_r,significant,total_modeled,total_observed\n";
    for (const FitReport* f : {&r.fit_exponential, &r.fit_prospect})
        out << f->model << ',' << format_double(f->scale) << ',' << format_double(f->pearson_r)
            << ',' << (f->significant ? "true" : "false") << ',' << format_double(f->total_modeled)
            << ',' << format_double(f->total_observed) << '\n';
}

inline void write_density_csv(const std::filesystem::path& path,
                              const std::vector<EconomicPotentialTable>& tables) {
    auto out = open_out(path);
    out << "month,r,mass\n";
    for (const auto& t : tables)
        for (const auto& [r, mass] : irr_density(t))
            out << t.month.str() << ',' << format_double(r) << ',' << format_double(mass) << '\n';
}

inline void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep) {
    auto out = open_out(path);
    out << "param_value,month,d_model\n";
    for (const auto& point : sweep.points)
        for (size_t i = 0; i < point.d_model.size(); ++i)
            out << format_double(point.value) << ','
                << point.d_model.first().plus_months(static_cast<int>(i)).str() << ','
                << format_double(point.d_model[i]) << '\n';
}

inline ordered_json manifest_base(const std::string& command, const Options& opt,
                                  const Dataset& aligned) {
    ordered_json j;
    j["command"] = command;
    j["data"] = opt.config.data_dir.string();
    j["out"] = opt.config.out_dir.string();
    j["start"] = aligned.feed_in_tariff.first().str();
    j["end"] = aligned.feed_in_tariff.last().str();
    j["samples"] = opt.config.n_samples;
    j["seed"] = opt.config.seed;
    j["grid"] = {{"r_min", opt.config.grid.r_min},
                 {"r_max", opt.config.grid.r_max},
                 {"step", opt.config.grid.step}};
    j["kappa"] = opt.config.behavioral.kappa;
    j["alpha"] = opt.config.behavioral.alpha;
    j["lambda"] = opt.config.behavioral.lambda;
    j["parameter_file"] =
        opt.config.parameter_file ? ordered_json(opt.config.parameter_file->string()) : ordered_json();
    return j;
}

inline void write_manifest(const std::filesystem::path& path, const ordered_json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

inline void warn_low_capture(const MeanIrrSeries& irr) {
    for (size_t i = 0; i < irr.captured_mass.size(); ++i)
        if (irr.captured_mass[i] < 0.99)
            std::cerr << "warning: " << irr.mean.first().plus_months(static_cast<int>(i)).str()
                      << ": only " << format_double(irr.captured_mass[i])
                      << " of the IRR mass falls inside the discount grid\n";
}

/// Applies a recorded manifest underneath any explicitly passed flags.
inline void apply_manifest(Options& opt, const std::filesystem::path& path,
                           const std::string& expected_command, const CLI::App& cmd) {
    std::ifstream in(path);
    if (!in) throw input_error(input_errc::io, "cannot open manifest " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(input_errc::parse, "malformed manifest " + path.string() + ": " + e.what());
    }
    try {
        if (j.at("command").get<std::string>() != expected_command)
            throw input_error(input_errc::bad_argument,
                              "manifest records command '" + j.at("command").get<std::string>() +
                                  "', not '" + expected_command + "'");
        auto unless = [&](const char* flag) { return cmd.count(flag) == 0; };
        if (unless("--data")) opt.config.data_dir = j.at("data").get<std::string>();
        if (unless("--out")) opt.config.out_dir = j.at("out").get<std::string>();
        if (unless("--start")) opt.config.start = MonthIndex::parse(j.at("start").get<std::string>());
        if (unless("--end")) opt.config.end = MonthIndex::parse(j.at("end").get<std::string>());
        if (unless("--samples")) opt.config.n_samples = j.at("samples").get<size_t>();
        if (unless("--seed")) opt.config.seed = j.at("seed").get<uint64_t>();
        if (unless("--grid")) {
            opt.config.grid.r_min = j.at("grid").at("r_min").get<double>();
            opt.config.grid.r_max = j.at("grid").at("r_max").get<double>();
            opt.config.grid.step = j.at("grid").at("step").get<double>();
        }
        if (unless("--kappa")) opt.config.behavioral.kappa = j.at("kappa").get<double>();
        if (unless("--alpha")) opt.config.behavioral.alpha = j.at("alpha").get<double>();
        if (unless("--lambda")) opt.config.behavioral.lambda = j.at("lambda").get<double>();
        if (unless("--params") && !j.at("parameter_file").is_null())
            opt.config.parameter_file = j.at("parameter_file").get<std::string>();
        if (j.contains("density") && cmd.count("--density") == 0)
            opt.density = j.at("density").get<bool>();
        if (j.contains("sweep_parameter") && cmd.count("--param") == 0)
            opt.sweep_parameter = j.at("sweep_parameter").get<std::string>();
        if (j.contains("sweep_values") && cmd.count("--values") == 0)
            opt.sweep_values = j.at("sweep_values").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw input_error(input_errc::parse,
                          "manifest " + path.string() + " is missing fields: " + e.what());
    }
}

} // namespace detail

inline int cmd_simulate(const Options& opt) {
    const Dataset aligned =
        align_dataset(load_dataset(opt.config.data_dir), opt.config.start, opt.config.end);
    std::filesystem::create_directories(opt.config.out_dir);

    std::vector<EconomicPotentialTable> tables;
    ScenarioResult result =
        run_scenario(opt.config, aligned, opt.threads, opt.density ? &tables : nullptr);
    detail::warn_low_capture(result.irr);

    const auto& out_dir = opt.config.out_dir;
    detail::write_mean_irr_csv(out_dir / "mean_irr.csv", result.irr);
    detail::write_uptake_csv(out_dir / "uptake.csv", result);
    detail::write_fit_report_csv(out_dir / "fit_report.csv", result);
    if (opt.density) detail::write_density_csv(out_dir / "irr_density.csv", tables);

    ordered_json manifest = detail::manifest_base("simulate", opt, aligned);
    manifest["density"] = opt.density;
    manifest["diagnostics"] = {
        {"pearson_mean_irr", result.mean_irr_pearson},
        {"pearson_risk_adjusted", result.risk_adjusted_pearson},
        {"pearson_exponential", result.fit_exponential.pearson_r},
        {"pearson_prospect", result.fit_prospect.pearson_r},
        {"scale_exponential", result.fit_exponential.scale},
        {"scale_prospect", result.fit_prospect.scale},
        {"rmse_exponential", result.rmse_exponential},
        {"rmse_prospect", result.rmse_prospect},
        {"total_observed", result.fit_prospect.total_observed},
    };
    detail::write_manifest(out_dir / "run_manifest.json", manifest);

    std::cout << "simulated " << result.observed.size() << " months "
              << result.observed.range_str() << " at " << opt.config.n_samples
              << " samples/month\n"
              << "pearson: mean_irr " << format_double(result.mean_irr_pearson) << ", exponential "
              << format_double(result.fit_exponential.pearson_r) << ", prospect "
              << format_double(result.fit_prospect.pearson_r) << '\n'
              << "wrote " << (out_dir / "mean_irr.csv").string() << ", uptake.csv, fit_report.csv"
              << (opt.density ? ", irr_density.csv" : "") << ", run_manifest.json\n";
    return 0;
}

inline int cmd_sweep(const Options& opt) {
    const SweepParameter parameter = parse_sweep_parameter(opt.sweep_parameter);
    if (opt.sweep_values.empty())
        throw input_error(input_errc::bad_argument, "sweep needs --values v1,v2,...");
    const Dataset aligned =
        align_dataset(load_dataset(opt.config.data_dir), opt.config.start, opt.config.end);
    std::filesystem::create_directories(opt.config.out_dir);

    SweepResult sweep =
        sensitivity_sweep(opt.config, aligned, parameter, opt.sweep_values, opt.threads);

    const auto file = opt.config.out_dir / ("sweep_" + sweep_parameter_name(parameter) + ".csv");
    detail::write_sweep_csv(file, sweep);

    ordered_json manifest = detail::manifest_base("sweep", opt, aligned);
    manifest["sweep_parameter"] = sweep_parameter_name(parameter);
    manifest["sweep_values"] = opt.sweep_values;
    ordered_json correlations = ordered_json::array();
    for (const auto& point : sweep.points)
        correlations.push_back({{"value", point.value}, {"pearson_r", point.pearson_r}});
    manifest["diagnostics"] = {{"pearson_by_value", correlations}};
    detail::write_manifest(opt.config.out_dir / "run_manifest.json", manifest);

    std::cout << "swept " << sweep_parameter_name(parameter) << " over " << sweep.points.size()
              << " values, wrote " << file.string() << '\n';
    return 0;
}

inline int cmd_validate(const Options& opt) {
    if (!std::filesystem::is_directory(opt.config.data_dir))
        throw input_error(input_errc::io,
                          "data directory " + opt.config.data_dir.string() + " does not exist");
    const Dataset data = load_dataset(opt.config.data_dir);
    const auto names = dataset_files;
    const auto series = data.all();
    for (size_t i = 0; i < series.size(); ++i)
        std::cout << "ok: " << names[i] << " " << series[i]->range_str() << " ("
                  << series[i]->size() << " months)\n";
    const Dataset aligned = align_dataset(data, opt.config.start, opt.config.end);
    std::cout << "coverage: all series cover " << aligned.feed_in_tariff.range_str() << " ("
              << aligned.feed_in_tariff.size() << " months)\n";
    return 0;
}

/// Full argv-level entry point. Returns the process exit code: 0 on
/// success, 1 for input errors, 2 for broken invariants.
inline int run_cli(std::vector<std::string> args) {
    CLI::App app{"Monte Carlo profitability and prospect-theory uptake model for rooftop PV"};
    app.require_subcommand(1);

    Options opt;
    std::string start_text, end_text;
    std::vector<double> grid_values;
    std::string params_file;
    std::string manifest_file;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--data", opt.config.data_dir, "directory with the input CSV files");
        cmd->add_option("--out", opt.config.out_dir, "output directory (default: out)");
        cmd->add_option("--start", start_text, "first month, YYYY-MM (default: data range)");
        cmd->add_option("--end", end_text, "last month, YYYY-MM (default: data range)");
        cmd->add_option("--samples", opt.config.n_samples, "Monte Carlo samples per month");
        cmd->add_option("--seed", opt.config.seed, "RNG seed; fixes every random draw");
        cmd->add_option("--kappa", opt.config.behavioral.kappa, "exponential-utility exponent scale");
        cmd->add_option("--alpha", opt.config.behavioral.alpha, "value-function saturation exponent");
        cmd->add_option("--lambda", opt.config.behavioral.lambda, "loss-aversion factor");
        cmd->add_option("--grid", grid_values, "discount grid as rmin,rmax,step")
            ->delimiter(',')
            ->expected(3);
        cmd->add_option("--params", params_file, "parameter-distribution override CSV");
        cmd->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
        cmd->add_option("--manifest", manifest_file, "re-run from a recorded run manifest");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run both uptake models and export CSVs");
    add_common(simulate);
    simulate->add_flag("--density", opt.density, "also export the per-month IRR density");

    CLI::App* sweep = app.add_subcommand("sweep", "sensitivity sweep over alpha, lambda or kappa");
    add_common(sweep);
    sweep->add_option("--param", opt.sweep_parameter, "parameter to sweep: alpha|lambda|kappa");
    sweep->add_option("--values", opt.sweep_values, "comma-separated parameter values")
        ->delimiter(',');

    CLI::App* validate = app.add_subcommand("validate", "check that the input CSVs load and align");
    add_common(validate);

    std::reverse(args.begin(), args.end()); // CLI11 parses argv-style reversed vectors
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        if (!manifest_file.empty())
            detail::apply_manifest(opt, manifest_file, cmd->get_name(), *cmd);
        if (cmd->count("--start")) opt.config.start = MonthIndex::parse(start_text);
        if (cmd->count("--end")) opt.config.end = MonthIndex::parse(end_text);
        if (cmd->count("--grid")) {
            opt.config.grid.r_min = grid_values[0];
            opt.config.grid.r_max = grid_values[1];
            opt.config.grid.step = grid_values[2];
        }
        if (cmd->count("--params")) opt.config.parameter_file = params_file;
        if (opt.config.data_dir.empty())
            throw input_error(input_errc::bad_argument, "--data DIR is required");
        opt.config.validate();

        if (cmd == simulate) return cmd_simulate(opt);
        if (cmd == sweep) return cmd_sweep(opt);
        return cmd_validate(opt);
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace pvuptake::cli
