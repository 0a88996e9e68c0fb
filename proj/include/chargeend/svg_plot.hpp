/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_SVG_PLOT_HPP
#define CHARGEEND_SVG_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chargeend/experiment.hpp"
#include "chargeend/profile.hpp"

namespace chargeend {

struct PlotSeries {
    std::string label;
    std::string color = "#2980b9";
    bool dashed = false;
    std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string xml_escape(const std::string &s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

// Fixed-size line chart with axes, grid, and a legend. Output depends only
// on the inputs, so identical data renders byte-identical SVGs.
inline std::string render_line_chart(const std::string &title, const std::string &x_label,
                                     const std::string &y_label,
                                     const std::vector<PlotSeries> &series) {
    constexpr double kWidth = 800, kHeight = 480;
    constexpr double kLeft = 64, kRight = 16, kTop = 40, kBottom = 48;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto &s : series) {
        for (const auto &[x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.04 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    const auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" "
           "viewBox=\"0 0 800 480\">\n";
    svg += "<rect width=\"800\" height=\"480\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" +
           detail::xml_escape(title) + "</text>\n";

    constexpr int kTicks = 6;
    for (int i = 0; i < kTicks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / (kTicks - 1);
        const double fy = ymin + (ymax - ymin) * i / (kTicks - 1);
        const std::string gx = detail::svg_num(px(fx));
        const std::string gy = detail::svg_num(py(fy));
        svg += "<line x1=\"" + gx + "\" y1=\"" + detail::svg_num(kTop) + "\" x2=\"" + gx +
               "\" y2=\"" + detail::svg_num(kTop + plot_h) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<line x1=\"" + detail::svg_num(kLeft) + "\" y1=\"" + gy + "\" x2=\"" +
               detail::svg_num(kLeft + plot_w) + "\" y2=\"" + gy +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + gx + "\" y=\"" + detail::svg_num(kTop + plot_h + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::tick_label(fx) + "</text>\n";
        svg += "<text x=\"" + detail::svg_num(kLeft - 6) + "\" y=\"" + detail::svg_num(py(fy) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::tick_label(fy) + "</text>\n";
    }
    svg += "<rect x=\"" + detail::svg_num(kLeft) + "\" y=\"" + detail::svg_num(kTop) +
           "\" width=\"" + detail::svg_num(plot_w) + "\" height=\"" + detail::svg_num(plot_h) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::svg_num(kLeft + plot_w / 2) + "\" y=\"" +
           detail::svg_num(kHeight - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::xml_escape(x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + detail::svg_num(kTop + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " +
           detail::svg_num(kTop + plot_h / 2) + ")\">" + detail::xml_escape(y_label) +
           "</text>\n";

    // cap points per polyline; stride selection is deterministic
    constexpr size_t kMaxPoints = 2000;
    for (const auto &s : series) {
        if (s.points.empty()) continue;
        const size_t stride = std::max<size_t>(1, (s.points.size() + kMaxPoints - 1) / kMaxPoints);
        std::string pts;
        for (size_t i = 0; i < s.points.size(); i += stride) {
            pts += detail::svg_num(px(s.points[i].first)) + "," +
                   detail::svg_num(py(s.points[i].second)) + " ";
        }
        const auto &last = s.points.back();
        pts += detail::svg_num(px(last.first)) + "," + detail::svg_num(py(last.second));
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
        if (s.dashed) svg += " stroke-dasharray=\"6 4\"";
        svg += " points=\"" + pts + "\"/>\n";
    }

    double ly = kTop + 14;
    for (const auto &s : series) {
        const std::string x0 = detail::svg_num(kLeft + plot_w - 150);
        const std::string x1 = detail::svg_num(kLeft + plot_w - 120);
        svg += "<line x1=\"" + x0 + "\" y1=\"" + detail::svg_num(ly - 4) + "\" x2=\"" + x1 +
               "\" y2=\"" + detail::svg_num(ly - 4) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        svg += "<text x=\"" + detail::svg_num(kLeft + plot_w - 114) + "\" y=\"" +
               detail::svg_num(ly) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::xml_escape(s.label) +
               "</text>\n";
        ly += 16;
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_svg(const std::string &path, const std::string &svg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << svg;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Renders one SVG per trace (baseline / corrected / true SOC) plus, per
// profile and gamma, an overlay of corrected-SOC error across injections.
// Returns the written paths.
inline std::vector<std::string> emit_plots(const std::string &traces_dir,
                                           const std::string &out_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(traces_dir))
        throw std::runtime_error("emit_plots: not a directory: " + traces_dir);
    fs::create_directories(out_dir);

    std::vector<fs::path> trace_files;
    for (const auto &entry : fs::directory_iterator(traces_dir)) {
        if (entry.is_regular_file() && parse_trace_filename(entry.path().filename().string()))
            trace_files.push_back(entry.path());
    }
    std::sort(trace_files.begin(), trace_files.end());
    if (trace_files.empty())
        throw std::runtime_error("emit_plots: no trace files in " + traces_dir);

    const std::vector<std::string> palette = {"#c0392b", "#2980b9", "#27ae60",
                                              "#8e44ad", "#d35400", "#16a085"};
    std::vector<std::string> written;
    // (id, gamma) -> (injection, error series), ordered for stable overlays
    std::map<std::pair<std::string, double>, std::vector<std::pair<double, PlotSeries>>> overlays;

    for (const auto &path : trace_files) {
        const auto name = *parse_trace_filename(path.filename().string());
        const auto trace = read_trace_csv(path.string());

        std::vector<PlotSeries> series;
        PlotSeries base{"coulomb counting", "#c0392b", false, {}};
        PlotSeries corr{"corrected", "#2980b9", false, {}};
        for (const auto &row : trace) {
            base.points.emplace_back(row.time_s, row.soc_baseline);
            corr.points.emplace_back(row.time_s, row.soc_corr);
        }
        series.push_back(base);
        series.push_back(corr);

        const fs::path truth_path = fs::path(traces_dir) / truth_filename(name.id);
        std::vector<std::pair<double, double>> truth;
        if (fs::exists(truth_path)) {
            truth = read_truth_csv(truth_path.string());
            if (truth.size() != trace.size())
                throw std::runtime_error("emit_plots: trace/truth length mismatch for " +
                                         path.filename().string());
            PlotSeries t{"true SOC", "#27ae60", true, truth};
            series.push_back(t);

            PlotSeries err;
            err.label = "inj " + detail::format_g(name.injection_pct) + "%";
            for (size_t k = 0; k < trace.size(); ++k)
                err.points.emplace_back(trace[k].time_s, trace[k].soc_corr - truth[k].second);
            overlays[{name.id, name.gamma}].emplace_back(name.injection_pct, err);
        }

        const std::string stem = path.filename().string();
        const std::string out_name = stem.substr(0, stem.size() - std::string(".trace.csv").size());
        const std::string title = name.id + "  inj " + detail::format_g(name.injection_pct) +
                                  "%  gamma " + detail::format_g(name.gamma);
        const std::string out_path = (fs::path(out_dir) / (out_name + ".svg")).string();
        write_svg(out_path, render_line_chart(title, "time to charge end (s)", "SOC (%)", series));
        written.push_back(out_path);
    }

    for (auto &[key, entries] : overlays) {
        std::sort(entries.begin(), entries.end(),
                  [](const auto &a, const auto &b) { return a.first < b.first; });
        std::vector<PlotSeries> series;
        for (size_t i = 0; i < entries.size(); ++i) {
            entries[i].second.color = palette[i % palette.size()];
            series.push_back(entries[i].second);
        }
        const std::string title =
            key.first + "  corrected SOC error, gamma " + detail::format_g(key.second);
        const std::string out_path =
            (fs::path(out_dir) /
             (key.first + "_g" + detail::format_g(key.second) + ".errors.svg"))
                .string();
        write_svg(out_path,
                  render_line_chart(title, "time to charge end (s)", "SOC error (%)", series));
        written.push_back(out_path);
    }
    return written;
}

}  // namespace chargeend

#endif  // CHARGEEND_SVG_PLOT_HPP
