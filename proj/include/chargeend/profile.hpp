/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_PROFILE_HPP
#define CHARGEEND_PROFILE_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chargeend {

enum class BmsMode { Idle, AcCharge, DcCharge, Discharge };

inline bool is_charging(BmsMode mode) {
    return mode == BmsMode::AcCharge || mode == BmsMode::DcCharge;
}

inline const char *mode_token(BmsMode mode) {
    switch (mode) {
        case BmsMode::Idle: return "IDLE";
        case BmsMode::AcCharge: return "AC_CHARGE";
        case BmsMode::DcCharge: return "DC_CHARGE";
        case BmsMode::Discharge: return "DISCHARGE";
    }
    return "IDLE";
}

inline BmsMode parse_mode(const std::string &token) {
    if (token == "IDLE") return BmsMode::Idle;
    if (token == "AC_CHARGE") return BmsMode::AcCharge;
    if (token == "DC_CHARGE") return BmsMode::DcCharge;
    if (token == "DISCHARGE") return BmsMode::Discharge;
    throw std::runtime_error("unknown BMS mode token: " + token);
}

// One telemetry record. Charging current is positive; t is relative seconds.
struct ChargeSample {
    double t = 0.0;        // s
    double current = 0.0;  // A, > 0 while charging
    double v_max = 0.0;    // V, maximum cell voltage
    double t_min = 0.0;    // degC, minimum cell temperature
    double t_max = 0.0;    // degC, maximum cell temperature
    BmsMode mode = BmsMode::Idle;
};

// Ordered telemetry plus the pack constants every estimator needs.
struct ChargeProfile {
    std::vector<ChargeSample> samples;
    double capacity_ah = 0.0;  // nominal pack capacity, Ah
    double v_100 = 0.0;        // max-cell voltage at which SOC is 100%, V
};

// Per-sample pipeline outputs, one row of the trace CSV.
struct StepOutput {
    double time_s = 0.0;
    double soc_baseline = 0.0;  // %
    double soc_vb = 0.0;        // %, mirrors soc_baseline while inactive
    double soc_corr = 0.0;      // %
    bool active = false;
};

inline double c_rate(double current_a, double capacity_ah) {
    if (!(capacity_ah > 0.0))
        throw std::invalid_argument("c_rate: capacity_ah must be > 0");
    return std::fabs(current_a) / capacity_ah;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline double parse_double(const std::string &s) {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters in number: " + s);
    return v;
}

inline std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace detail

inline constexpr const char *kProfileCsvHeader = "time_s,current_a,v_max_v,t_min_c,t_max_c,mode";
inline constexpr const char *kTraceCsvHeader =
    "time_s,soc_baseline_pct,soc_vb_pct,soc_corr_pct,active";

// Reads a profile CSV. Leading '#' lines carry the pack metadata
// (capacity_ah, v_100) so a written profile reloads as the same value.
inline ChargeProfile load_profile_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile CSV: " + path);

    ChargeProfile profile;
    bool have_capacity = false, have_v100 = false, have_header = false;
    std::string line;
    long data_row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;  // plain comment
            std::string key = body.substr(0, eq);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            if (key == "capacity_ah") {
                profile.capacity_ah = detail::parse_double(body.substr(eq + 1));
                have_capacity = true;
            } else if (key == "v_100") {
                profile.v_100 = detail::parse_double(body.substr(eq + 1));
                have_v100 = true;
            }
            continue;
        }
        if (!have_header) {
            if (detail::split_csv_line(line) != detail::split_csv_line(kProfileCsvHeader))
                throw std::runtime_error(path + ": bad header, expected '" +
                                         std::string(kProfileCsvHeader) + "'");
            have_header = true;
            continue;
        }
        ++data_row;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 6)
            throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                                     ": expected 6 columns, got " + std::to_string(fields.size()));
        ChargeSample s;
        try {
            s.t = detail::parse_double(fields[0]);
            s.current = detail::parse_double(fields[1]);
            s.v_max = detail::parse_double(fields[2]);
            s.t_min = detail::parse_double(fields[3]);
            s.t_max = detail::parse_double(fields[4]);
            s.mode = parse_mode(fields[5]);
        } catch (const std::exception &e) {
            throw std::runtime_error(path + ": row " + std::to_string(data_row) + ": " + e.what());
        }
        if (!std::isfinite(s.t))
            throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                                     ": non-finite timestamp");
        if (!(s.v_max > 0.0))
            throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                                     ": v_max must be > 0");
        if (s.t_min > s.t_max)
            throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                                     ": t_min exceeds t_max");
        if (!profile.samples.empty() && !(s.t > profile.samples.back().t))
            throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                                     ": timestamps must be strictly increasing");
        profile.samples.push_back(s);
    }
    if (!have_header) throw std::runtime_error(path + ": missing header row");
    if (profile.samples.empty()) throw std::runtime_error(path + ": no samples");
    if (!have_capacity || !have_v100)
        throw std::runtime_error(path + ": missing '# capacity_ah = ...' or '# v_100 = ...' metadata");
    if (!(profile.capacity_ah > 0.0)) throw std::runtime_error(path + ": capacity_ah must be > 0");
    if (!(profile.v_100 > 0.0)) throw std::runtime_error(path + ": v_100 must be > 0");
    return profile;
}

inline void write_profile_csv(const std::string &path, const ChargeProfile &profile) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "# capacity_ah = " << detail::format_g(profile.capacity_ah) << "\n";
    out << "# v_100 = " << detail::format_g(profile.v_100) << "\n";
    out << kProfileCsvHeader << "\n";
    for (const auto &s : profile.samples) {
        out << detail::format_g(s.t) << ',' << detail::format_g(s.current) << ','
            << detail::format_g(s.v_max) << ',' << detail::format_g(s.t_min) << ','
            << detail::format_g(s.t_max) << ',' << mode_token(s.mode) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_trace_csv(const std::string &path, const std::vector<StepOutput> &rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << kTraceCsvHeader << "\n";
    char buf[160];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%d", r.time_s, r.soc_baseline,
                      r.soc_vb, r.soc_corr, r.active ? 1 : 0);
        out << buf << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<StepOutput> read_trace_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::split_csv_line(line) != detail::split_csv_line(kTraceCsvHeader))
        throw std::runtime_error(path + ": bad trace header");
    std::vector<StepOutput> rows;
    long data_row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++data_row;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 5)
            throw std::runtime_error(path + ": row " + std::to_string(data_row) +
                                     ": expected 5 columns");
        StepOutput r;
        try {
            r.time_s = detail::parse_double(fields[0]);
            r.soc_baseline = detail::parse_double(fields[1]);
            r.soc_vb = detail::parse_double(fields[2]);
            r.soc_corr = detail::parse_double(fields[3]);
            r.active = detail::parse_double(fields[4]) != 0.0;
        } catch (const std::exception &e) {
            throw std::runtime_error(path + ": row " + std::to_string(data_row) + ": " + e.what());
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace chargeend

#endif  // CHARGEEND_PROFILE_HPP
