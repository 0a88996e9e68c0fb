/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

// Command-line front end: generate synthetic charge profiles, calibrate
// detector thresholds, run error-injection experiments, render plots.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chargeend/config.hpp"
#include "chargeend/experiment.hpp"
#include "chargeend/svg_plot.hpp"

namespace {

using namespace chargeend;

AnchorRule parse_rule(const std::string &text) {
    if (text.rfind("soc:", 0) == 0)
        return AnchorRule::soc_threshold(detail::parse_double(text.substr(4)));
    if (text.rfind("ttc:", 0) == 0)
        return AnchorRule::ttc_threshold(detail::parse_double(text.substr(4)));
    throw std::runtime_error("rule must be soc:<percent> or ttc:<seconds>, got '" + text + "'");
}

BmsMode parse_charge_mode(const std::string &text) {
    if (text == "AC") return BmsMode::AcCharge;
    if (text == "DC") return BmsMode::DcCharge;
    throw std::runtime_error("mode must be AC or DC, got '" + text + "'");
}

int cmd_init_config(const std::string &out_path) {
    save_config(out_path, default_config());
    std::cout << "wrote default config to " << out_path << "\n";
    return 0;
}

int cmd_simulate(const std::string &config_path, const std::string &out_dir) {
    const Config cfg = load_config(config_path);
    const StrategyParams params = to_strategy_params(cfg);
    const auto sources = to_profile_sources(cfg);
    std::filesystem::create_directories(out_dir);
    int generated = 0;
    for (const auto &src : sources) {
        if (src.kind == ProfileSource::Kind::Csv) {
            std::cout << "skipping " << src.id << " (csv source)\n";
            continue;
        }
        const ResolvedProfile r = resolve_source(src, params.v_100);
        const auto dir = std::filesystem::path(out_dir);
        write_profile_csv((dir / (src.id + ".profile.csv")).string(), r.profile);
        std::vector<double> times;
        times.reserve(r.profile.samples.size());
        for (const auto &s : r.profile.samples) times.push_back(s.t);
        write_truth_csv((dir / truth_filename(src.id)).string(), times, r.truth);
        std::cout << src.id << ": " << r.profile.samples.size() << " samples, "
                  << r.profile.samples.back().t << " s\n";
        ++generated;
    }
    if (generated == 0) throw std::runtime_error("no simulator profiles in config");
    return 0;
}

int cmd_calibrate(const std::string &profiles_dir, const std::string &mode_text,
                  const std::string &rule_text, const std::string &out_path,
                  const std::string &base_config) {
    const BmsMode mode = parse_charge_mode(mode_text);
    const AnchorRule rule = parse_rule(rule_text);
    const ThresholdMap map = run_calibration(profiles_dir, rule, mode);

    Config cfg = base_config.empty() ? default_config() : load_config(base_config);
    const std::string prefix = mode == BmsMode::AcCharge ? "detector.ac." : "detector.dc.";
    cfg.set(prefix + "c0", map.c0);
    cfg.set(prefix + "c1", map.c1);
    cfg.set(prefix + "c2", map.c2);
    save_config(out_path, cfg);
    std::printf("fitted %s threshold map: c0=%.9g c1=%.9g c2=%.9g\n", mode_text.c_str(), map.c0,
                map.c1, map.c2);
    std::cout << "wrote config to " << out_path << "\n";
    return 0;
}

int cmd_run(const std::string &config_path, const std::string &out_dir) {
    const Config cfg = load_config(config_path);
    const ExperimentSpec spec = to_experiment_spec(cfg, out_dir);
    const auto summaries = run_experiment(spec);
    std::printf("%-10s %6s %8s %10s %10s %12s %10s\n", "profile", "gamma", "inj%", "corr_err%",
                "raw_err%", "t_act_s", "max_jump%");
    for (const auto &s : summaries) {
        std::printf("%-10s %6.3g %8.1f %10.3f %10.3f %12.1f %10.3f\n", s.profile_id.c_str(),
                    s.gamma, s.injected_error_pct, s.final_corrected_error_pct,
                    s.final_baseline_raw_error_pct, s.activation_time_s, s.max_step_jump_pct);
    }
    std::cout << summaries.size() << " runs written to " << out_dir << "\n";
    return 0;
}

int cmd_plot(const std::string &traces_dir, const std::string &out_dir) {
    const auto written = emit_plots(traces_dir, out_dir);
    std::cout << written.size() << " SVG files written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"charge-end SOC correction toolkit"};
    app.require_subcommand(1);

    std::string init_out;
    auto *init = app.add_subcommand("init-config", "write the default config file");
    init->add_option("--out", init_out, "output config path")->required();

    std::string sim_config, sim_out;
    auto *sim = app.add_subcommand("simulate", "generate synthetic charge profiles");
    sim->add_option("--config", sim_config, "config file")->required();
    sim->add_option("--out", sim_out, "output directory")->required();

    std::string cal_dir, cal_mode, cal_rule, cal_out, cal_base;
    auto *cal = app.add_subcommand("calibrate", "fit a detector threshold map from profiles");
    cal->add_option("--profiles", cal_dir, "directory of profile CSVs")->required();
    cal->add_option("--mode", cal_mode, "AC or DC")->required();
    cal->add_option("--rule", cal_rule, "anchor rule, soc:<percent> or ttc:<seconds>")->required();
    cal->add_option("--out", cal_out, "output config path")->required();
    cal->add_option("--config", cal_base, "base config to overlay (default: built-in defaults)");

    std::string run_config, run_out;
    auto *run = app.add_subcommand("run", "run the error-injection experiment grid");
    run->add_option("--config", run_config, "config file")->required();
    run->add_option("--out", run_out, "output directory")->required();

    std::string plot_traces, plot_out;
    auto *plot = app.add_subcommand("plot", "render SVG charts from trace CSVs");
    plot->add_option("--traces", plot_traces, "directory of trace/truth CSVs")->required();
    plot->add_option("--out", plot_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (init->parsed()) return cmd_init_config(init_out);
        if (sim->parsed()) return cmd_simulate(sim_config, sim_out);
        if (cal->parsed()) return cmd_calibrate(cal_dir, cal_mode, cal_rule, cal_out, cal_base);
        if (run->parsed()) return cmd_run(run_config, run_out);
        if (plot->parsed()) return cmd_plot(plot_traces, plot_out);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
