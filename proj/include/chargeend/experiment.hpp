/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_EXPERIMENT_HPP
#define CHARGEEND_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chargeend/baseline.hpp"
#include "chargeend/calibration.hpp"
#include "chargeend/cellsim.hpp"
#include "chargeend/config.hpp"
#include "chargeend/corrector.hpp"
#include "chargeend/profile.hpp"

namespace chargeend {

// One experiment input: either an imported telemetry CSV or a simulated
// cell/charger pairing with known true SOC.
struct ProfileSource {
    enum class Kind { Csv, Sim };
    std::string id;
    Kind kind = Kind::Sim;
    std::string csv_path;  // Kind::Csv
    EcmCell cell;          // Kind::Sim; cell.soc_true is the starting SOC
    ChargerSpec charger;   // Kind::Sim
    double dt_s = 1.0;
    double t_min_c = 20.0;
    double t_max_c = 25.0;
    double imbalance_v = 0.0;
};

struct ExperimentSpec {
    std::vector<ProfileSource> profiles;
    std::vector<double> injections_pct{-5.0, -15.0, -25.0, -35.0};  // added to true initial SOC
    std::vector<double> gammas{1.0, 2.0};
    StrategyParams params;
    double eta = 1.0;
    std::string out_dir;
    bool write_files = true;
};

struct RunSummary {
    std::string profile_id;
    double gamma = 1.0;
    double injected_error_pct = 0.0;             // actual post-clamp offset, signed
    double final_corrected_error_pct = 0.0;      // vs true SOC at charge end
    double final_baseline_raw_error_pct = 0.0;   // coulomb counter without the snap
    double activation_time_s = 0.0;              // relative to charge end, <= 0; NaN if never
    double max_step_jump_pct = 0.0;              // max |delta soc_corr| in the active window
    double max_baseline_jump_pct = 0.0;          // max |delta snapped baseline|, not in the CSV
};

struct RunOutput {
    std::vector<StepOutput> trace;  // times re-based so charge end = 0
    RunSummary summary;
};

struct ResolvedProfile {
    ChargeProfile profile;
    std::vector<double> truth;  // true SOC per sample, %
};

// Ground truth: the simulator's SOC state, or backward coulomb counting
// for imported full-charge sessions.
inline ResolvedProfile resolve_source(const ProfileSource &src, double v_100) {
    if (src.kind == ProfileSource::Kind::Csv) {
        ResolvedProfile r;
        r.profile = load_profile_csv(src.csv_path);
        if (r.profile.samples.back().v_max < r.profile.v_100)
            throw std::runtime_error(src.csv_path +
                                     ": not a full-charge profile (final v_max below v_100), "
                                     "cannot derive ground truth");
        r.truth = backward_soc(r.profile);
        return r;
    }
    SimResult sim = generate_profile(src.cell, src.charger, src.dt_s,
                                     constant_temps(src.t_min_c, src.t_max_c), v_100,
                                     SimOptions{src.imbalance_v, 2'000'000});
    return ResolvedProfile{std::move(sim.profile), std::move(sim.true_soc)};
}

// Baseline and corrector in lockstep over one profile. The coulomb counter
// integrates each sample's current across the interval it opens; the snap
// and the strategy react to the sample just observed.
inline RunOutput run_single(const ChargeProfile &profile, const std::vector<double> &truth,
                            double injection_pct, StrategyParams params, double eta,
                            const std::string &profile_id) {
    const auto &s = profile.samples;
    if (s.empty()) throw std::invalid_argument("run_single: empty profile");
    if (truth.size() != s.size())
        throw std::invalid_argument("run_single: truth length mismatch");
    params.capacity_ah = profile.capacity_ah;  // C-rate lookups follow the data's pack

    const double soc0 = std::clamp(truth.front() + injection_pct, 0.0, 100.0);
    BaselineState base = init_baseline(soc0, profile.capacity_ah, eta);
    BaselineState raw = base;  // without the snap, for the error bookkeeping
    constexpr double kNoSnap = std::numeric_limits<double>::infinity();

    RunOutput out;
    out.trace.reserve(s.size());
    CorrectorState corr;
    const double t_end = s.back().t;

    for (size_t k = 0; k < s.size(); ++k) {
        if (k > 0) {
            const double dt = s[k].t - s[k - 1].t;
            base = step_baseline(base, s[k - 1], dt, params.v_100);
            raw = step_baseline(raw, s[k - 1], dt, kNoSnap);
        }
        const double soc_b = snapped_soc(base, s[k].v_max, params.v_100);
        auto stepped = step_corrector(corr, s[k], soc_b, params, s[k].t);
        corr = std::move(stepped.state);
        stepped.output.time_s = s[k].t - t_end;
        out.trace.push_back(stepped.output);
    }

    RunSummary &sum = out.summary;
    sum.profile_id = profile_id;
    sum.gamma = params.gamma;
    sum.injected_error_pct = soc0 - truth.front();
    sum.final_corrected_error_pct = out.trace.back().soc_corr - truth.back();
    sum.final_baseline_raw_error_pct = raw.soc - truth.back();
    sum.activation_time_s = std::numeric_limits<double>::quiet_NaN();
    sum.max_step_jump_pct = 0.0;
    sum.max_baseline_jump_pct = 0.0;
    for (size_t k = 0; k < out.trace.size(); ++k) {
        if (out.trace[k].active && std::isnan(sum.activation_time_s))
            sum.activation_time_s = out.trace[k].time_s;
        if (k > 0) {
            sum.max_baseline_jump_pct =
                std::max(sum.max_baseline_jump_pct,
                         std::fabs(out.trace[k].soc_baseline - out.trace[k - 1].soc_baseline));
            if (out.trace[k].active || out.trace[k - 1].active)
                sum.max_step_jump_pct =
                    std::max(sum.max_step_jump_pct,
                             std::fabs(out.trace[k].soc_corr - out.trace[k - 1].soc_corr));
        }
    }
    return out;
}

inline std::string trace_filename(const std::string &id, double injection_pct, double gamma) {
    return id + "_inj" + detail::format_g(injection_pct) + "_g" + detail::format_g(gamma) +
           ".trace.csv";
}

inline std::string truth_filename(const std::string &id) { return id + ".truth.csv"; }

struct TraceName {
    std::string id;
    double injection_pct = 0.0;
    double gamma = 1.0;
};

inline std::optional<TraceName> parse_trace_filename(const std::string &filename) {
    const std::string suffix = ".trace.csv";
    if (filename.size() <= suffix.size() ||
        filename.compare(filename.size() - suffix.size(), suffix.size(), suffix) != 0)
        return std::nullopt;
    const std::string stem = filename.substr(0, filename.size() - suffix.size());
    const auto gpos = stem.rfind("_g");
    if (gpos == std::string::npos) return std::nullopt;
    const auto ipos = stem.rfind("_inj", gpos);
    if (ipos == std::string::npos) return std::nullopt;
    try {
        TraceName t;
        t.id = stem.substr(0, ipos);
        t.injection_pct = detail::parse_double(stem.substr(ipos + 4, gpos - ipos - 4));
        t.gamma = detail::parse_double(stem.substr(gpos + 2));
        return t;
    } catch (const std::exception &) {
        return std::nullopt;
    }
}

inline void write_truth_csv(const std::string &path, const std::vector<double> &times,
                            const std::vector<double> &truth) {
    if (times.size() != truth.size())
        throw std::invalid_argument("write_truth_csv: length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "time_s,soc_true_pct\n";
    char buf[64];
    for (size_t k = 0; k < truth.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", times[k], truth[k]);
        out << buf << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<std::pair<double, double>> read_truth_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open truth CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 2) throw std::runtime_error(path + ": expected 2 columns");
        rows.emplace_back(detail::parse_double(fields[0]), detail::parse_double(fields[1]));
    }
    return rows;
}

inline std::string summary_filename(double gamma) {
    return "summary_g" + detail::format_g(gamma) + ".csv";
}

inline void write_summary_csv(const std::string &path, const std::vector<RunSummary> &rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "profile,injected_error_pct,final_corrected_error_pct,"
           "final_baseline_raw_error_pct,activation_time_s,max_step_jump_pct\n";
    char buf[200];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f", r.injected_error_pct,
                      r.final_corrected_error_pct, r.final_baseline_raw_error_pct,
                      r.activation_time_s, r.max_step_jump_pct);
        out << r.profile_id << ',' << buf << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Full (profile x injection x gamma) grid. Traces, per-profile ground
// truth and per-gamma summaries land in spec.out_dir.
inline std::vector<RunSummary> run_experiment(const ExperimentSpec &spec) {
    if (spec.profiles.empty()) throw std::invalid_argument("run_experiment: no profiles");
    for (const auto &src : spec.profiles) {
        // a threshold at or above v_100 could never fire before charge end
        if (src.kind != ProfileSource::Kind::Sim) continue;
        const bool is_ac = src.charger.kind == ChargerSpec::Kind::AcCcCv;
        const ThresholdMap &map = is_ac ? spec.params.map_ac : spec.params.map_dc;
        const double thr = map.eval(src.t_min_c, src.t_max_c);
        if (!std::isfinite(thr) || thr >= spec.params.v_100)
            throw std::runtime_error("run_experiment: profile '" + src.id + "': " +
                                     (is_ac ? "AC" : "DC") +
                                     " threshold evaluates to " + detail::format_g(thr) +
                                     " V at its temperatures, not below v_100");
    }
    namespace fs = std::filesystem;
    if (spec.write_files) fs::create_directories(spec.out_dir);

    std::vector<RunSummary> summaries;
    for (const auto &src : spec.profiles) {
        const ResolvedProfile resolved = resolve_source(src, spec.params.v_100);
        bool truth_written = false;
        for (const double gamma : spec.gammas) {
            StrategyParams params = spec.params;
            params.gamma = gamma;
            for (const double injection : spec.injections_pct) {
                RunOutput run = run_single(resolved.profile, resolved.truth, injection, params,
                                           spec.eta, src.id);
                if (spec.write_files) {
                    const fs::path dir(spec.out_dir);
                    write_trace_csv((dir / trace_filename(src.id, injection, gamma)).string(),
                                    run.trace);
                    if (!truth_written) {
                        std::vector<double> times;
                        times.reserve(run.trace.size());
                        for (const auto &row : run.trace) times.push_back(row.time_s);
                        write_truth_csv((dir / truth_filename(src.id)).string(), times,
                                        resolved.truth);
                        truth_written = true;
                    }
                }
                summaries.push_back(run.summary);
            }
        }
    }
    if (spec.write_files) {
        for (const double gamma : spec.gammas) {
            std::vector<RunSummary> rows;
            for (const auto &s : summaries)
                if (s.gamma == gamma) rows.push_back(s);
            write_summary_csv(
                (std::filesystem::path(spec.out_dir) / summary_filename(gamma)).string(), rows);
        }
    }
    return summaries;
}

// Fits a threshold map from every usable same-mode full-charge profile in
// a directory. Unreadable files and failed anchors are skipped with a
// warning; an empty yield is an error.
inline ThresholdMap run_calibration(const std::string &profile_dir, const AnchorRule &rule,
                                    BmsMode mode) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(profile_dir))
        throw std::runtime_error("run_calibration: not a directory: " + profile_dir);

    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(profile_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() < 4 || name.compare(name.size() - 4, 4, ".csv") != 0) continue;
        if (name.find(".trace.csv") != std::string::npos) continue;
        if (name.find(".truth.csv") != std::string::npos) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<Anchor> anchors;
    for (const auto &path : files) {
        ChargeProfile profile;
        try {
            profile = load_profile_csv(path.string());
        } catch (const std::exception &e) {
            std::cerr << "calibration: skipping " << path.string() << ": " << e.what() << "\n";
            continue;
        }
        if (profile.samples.back().mode != mode) continue;
        try {
            anchors.push_back(anchor_point(profile, rule));
        } catch (const std::exception &e) {
            std::cerr << "calibration: skipping " << path.string() << ": " << e.what() << "\n";
        }
    }
    if (anchors.empty())
        throw std::runtime_error("run_calibration: no usable " +
                                 std::string(mode_token(mode)) + " profiles in " + profile_dir);
    return fit_threshold_map(anchors);
}

// The stock experiment set: five stepped DC fast-charge profiles and four
// CC-CV wall-charge profiles over a spread of starting SOCs, currents and
// temperatures.
inline std::vector<ProfileSource> default_profile_sources(const EcmCell &base_cell) {
    auto dc = [&](const std::string &id, double soc0, double dt, double tmin, double tmax,
                  std::vector<std::pair<double, double>> steps, double cutoff) {
        ProfileSource s;
        s.id = id;
        s.kind = ProfileSource::Kind::Sim;
        s.cell = base_cell;
        s.cell.soc_true = soc0;
        s.charger.kind = ChargerSpec::Kind::DcMultiStep;
        s.charger.steps = std::move(steps);
        s.charger.cv_voltage_v = 4.20;
        s.charger.cutoff_current_a = cutoff;
        s.dt_s = dt;
        s.t_min_c = tmin;
        s.t_max_c = tmax;
        return s;
    };
    auto ac = [&](const std::string &id, double soc0, double dt, double tmin, double tmax,
                  double cc, double cutoff) {
        ProfileSource s;
        s.id = id;
        s.kind = ProfileSource::Kind::Sim;
        s.cell = base_cell;
        s.cell.soc_true = soc0;
        s.charger.kind = ChargerSpec::Kind::AcCcCv;
        s.charger.cc_current_a = cc;
        s.charger.cv_voltage_v = 4.20;
        s.charger.cutoff_current_a = cutoff;
        s.dt_s = dt;
        s.t_min_c = tmin;
        s.t_max_c = tmax;
        return s;
    };
    return {
        dc("dc_a", 40.0, 1.0, 18.0, 24.0, {{85, 60}, {92, 30}, {96, 10}, {98.5, 6}, {100, 3}}, 3.0),
        dc("dc_b", 45.0, 1.0, 22.0, 30.0, {{85, 72}, {92, 36}, {96, 12}, {98.5, 7}, {100, 2.5}},
           2.5),
        dc("dc_c", 38.0, 1.0, 10.0, 15.0, {{80, 54}, {90, 27}, {95, 9}, {98, 5}, {100, 2}}, 2.0),
        dc("dc_d", 50.0, 2.0, 25.0, 33.0, {{85, 66}, {92, 33}, {96, 11}, {98.5, 5.5}, {100, 3}},
           3.0),
        dc("dc_e", 42.0, 1.0, 15.0, 20.0, {{88, 48}, {94, 24}, {97, 8}, {98.8, 4}, {100, 2.5}},
           2.5),
        ac("ac_a", 40.0, 10.0, 20.0, 22.0, 10.0, 0.5),
        ac("ac_b", 45.0, 10.0, 24.0, 27.0, 12.0, 0.6),
        ac("ac_c", 38.0, 5.0, 12.0, 14.0, 12.0, 0.8),
        ac("ac_d", 50.0, 10.0, 28.0, 31.0, 8.0, 0.5),
    };
}

inline void encode_profile_sources(Config &cfg, const std::vector<ProfileSource> &sources) {
    std::string names;
    for (const auto &src : sources) {
        if (!names.empty()) names += ", ";
        names += src.id;
        const std::string p = "profile." + src.id + ".";
        if (src.kind == ProfileSource::Kind::Csv) {
            cfg.set(p + "kind", "csv");
            cfg.set(p + "path", src.csv_path);
            continue;
        }
        cfg.set(p + "kind",
                src.charger.kind == ChargerSpec::Kind::AcCcCv ? std::string("ac")
                                                              : std::string("dc"));
        cfg.set(p + "soc0_pct", src.cell.soc_true);
        cfg.set(p + "dt_s", src.dt_s);
        cfg.set(p + "t_min_c", src.t_min_c);
        cfg.set(p + "t_max_c", src.t_max_c);
        cfg.set(p + "cv_v", src.charger.cv_voltage_v);
        cfg.set(p + "cutoff_a", src.charger.cutoff_current_a);
        if (src.charger.kind == ChargerSpec::Kind::AcCcCv)
            cfg.set(p + "cc_a", src.charger.cc_current_a);
        else
            cfg.set_pairs(p + "dc_steps", src.charger.steps);
        if (src.imbalance_v != 0.0) cfg.set(p + "imbalance_v", src.imbalance_v);
    }
    cfg.set("profiles", names);
}

inline std::vector<ProfileSource> to_profile_sources(const Config &cfg) {
    const EcmCell base_cell = to_cell(cfg);
    if (!cfg.has("profiles")) return default_profile_sources(base_cell);
    std::vector<ProfileSource> out;
    for (const auto &id : cfg.get_names("profiles")) {
        const std::string p = "profile." + id + ".";
        ProfileSource src;
        src.id = id;
        const std::string kind = cfg.get(p + "kind");
        if (kind == "csv") {
            src.kind = ProfileSource::Kind::Csv;
            src.csv_path = cfg.get(p + "path");
            out.push_back(std::move(src));
            continue;
        }
        src.kind = ProfileSource::Kind::Sim;
        src.cell = base_cell;
        src.cell.soc_true = cfg.get_double(p + "soc0_pct");
        src.dt_s = cfg.get_double_or(p + "dt_s", 1.0);
        src.t_min_c = cfg.get_double_or(p + "t_min_c", 20.0);
        src.t_max_c = cfg.get_double_or(p + "t_max_c", 25.0);
        src.imbalance_v = cfg.get_double_or(p + "imbalance_v", 0.0);
        src.charger.cv_voltage_v = cfg.get_double_or(p + "cv_v", 4.20);
        src.charger.cutoff_current_a = cfg.get_double(p + "cutoff_a");
        if (kind == "ac") {
            src.charger.kind = ChargerSpec::Kind::AcCcCv;
            src.charger.cc_current_a = cfg.get_double(p + "cc_a");
        } else if (kind == "dc") {
            src.charger.kind = ChargerSpec::Kind::DcMultiStep;
            src.charger.steps = cfg.get_pairs(p + "dc_steps");
        } else {
            throw std::runtime_error("config: profile." + id + ".kind must be ac, dc or csv");
        }
        out.push_back(std::move(src));
    }
    if (out.empty()) throw std::runtime_error("config: empty 'profiles' list");
    return out;
}

inline ExperimentSpec to_experiment_spec(const Config &cfg, const std::string &out_dir) {
    ExperimentSpec spec;
    spec.params = to_strategy_params(cfg);
    spec.profiles = to_profile_sources(cfg);
    spec.eta = cfg.get_double_or("baseline.eta", 1.0);
    if (cfg.has("experiment.injections_pct"))
        spec.injections_pct = cfg.get_doubles("experiment.injections_pct");
    if (cfg.has("experiment.gammas")) spec.gammas = cfg.get_doubles("experiment.gammas");
    for (const double g : spec.gammas)
        if (!(g >= 1.0)) throw std::runtime_error("config: experiment.gammas must all be >= 1");
    spec.out_dir = out_dir;
    return spec;
}

inline Config default_config() {
    Config cfg;
    encode_strategy_params(cfg, StrategyParams{});
    encode_cell(cfg, EcmCell{});
    cfg.set("baseline.eta", 1.0);
    const ExperimentSpec spec;  // default injections and gammas
    cfg.set_doubles("experiment.injections_pct", spec.injections_pct);
    cfg.set_doubles("experiment.gammas", spec.gammas);
    encode_profile_sources(cfg, default_profile_sources(EcmCell{}));
    return cfg;
}

}  // namespace chargeend

#endif  // CHARGEEND_EXPERIMENT_HPP
