/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_CONFIG_HPP
#define CHARGEEND_CONFIG_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chargeend/cellsim.hpp"
#include "chargeend/corrector.hpp"
#include "chargeend/profile.hpp"

namespace chargeend {

// Flat `key = value` text config. '#' starts a comment, later duplicate
// keys win, keys are emitted sorted so saved files diff cleanly.
struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string &key) const { return kv.count(key) != 0; }

    const std::string &get(const std::string &key) const {
        const auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error("config: missing key '" + key + "'");
        return it->second;
    }

    std::string get_or(const std::string &key, const std::string &fallback) const {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    double get_double(const std::string &key) const {
        const std::string &raw = get(key);
        try {
            return detail::parse_double(raw);
        } catch (const std::exception &) {
            throw std::runtime_error("config: key '" + key + "' is not a number: " + raw);
        }
    }

    double get_double_or(const std::string &key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    std::vector<double> get_doubles(const std::string &key) const {
        std::vector<double> out;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                out.push_back(detail::parse_double(item));
            } catch (const std::invalid_argument &) {
                throw std::runtime_error("config: bad number list in '" + key + "'");
            }
        }
        if (out.empty()) throw std::runtime_error("config: empty list in '" + key + "'");
        return out;
    }

    // "a:b, c:d" pair lists, used for alpha curves, OCV knots and DC steps
    std::vector<std::pair<double, double>> get_pairs(const std::string &key) const {
        std::vector<std::pair<double, double>> out;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("config: expected 'x:y' pairs in '" + key + "'");
            try {
                out.emplace_back(detail::parse_double(item.substr(0, colon)),
                                 detail::parse_double(item.substr(colon + 1)));
            } catch (const std::invalid_argument &) {
                throw std::runtime_error("config: bad pair list in '" + key + "'");
            }
        }
        if (out.empty()) throw std::runtime_error("config: empty pair list in '" + key + "'");
        return out;
    }

    std::vector<std::string> get_names(const std::string &key) const {
        std::vector<std::string> out;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) continue;
            out.push_back(item.substr(b, e - b + 1));
        }
        return out;
    }

    void set(const std::string &key, const std::string &value) { kv[key] = value; }
    void set(const std::string &key, double value) { kv[key] = detail::format_g(value); }

    void set_pairs(const std::string &key, const std::vector<std::pair<double, double>> &pairs) {
        std::string s;
        for (size_t i = 0; i < pairs.size(); ++i) {
            if (i) s += ", ";
            s += detail::format_g(pairs[i].first) + ":" + detail::format_g(pairs[i].second);
        }
        kv[key] = s;
    }

    void set_doubles(const std::string &key, const std::vector<double> &values) {
        std::string s;
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) s += ", ";
            s += detail::format_g(values[i]);
        }
        kv[key] = s;
    }
};

inline Config load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    Config cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        const auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb, value.find_last_not_of(" \t") - vb + 1);
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty key");
        cfg.kv[key] = value;
    }
    return cfg;
}

inline void save_config(const std::string &path, const Config &cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto &[key, value] : cfg.kv) out << key << " = " << value << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline StrategyParams to_strategy_params(const Config &cfg) {
    const StrategyParams d;  // built-in defaults
    StrategyParams p;
    p.v_100 = cfg.get_double_or("pack.v_100", d.v_100);
    p.capacity_ah = cfg.get_double_or("pack.capacity_ah", d.capacity_ah);
    p.gamma = cfg.get_double_or("strategy.gamma", d.gamma);
    p.t_debounce_s = cfg.get_double_or("strategy.t_debounce_s", d.t_debounce_s);
    p.denom_epsilon = cfg.get_double_or("strategy.denom_epsilon_v", d.denom_epsilon);
    p.map_ac = ThresholdMap{cfg.get_double_or("detector.ac.c0", d.map_ac.c0),
                            cfg.get_double_or("detector.ac.c1", d.map_ac.c1),
                            cfg.get_double_or("detector.ac.c2", d.map_ac.c2)};
    p.map_dc = ThresholdMap{cfg.get_double_or("detector.dc.c0", d.map_dc.c0),
                            cfg.get_double_or("detector.dc.c1", d.map_dc.c1),
                            cfg.get_double_or("detector.dc.c2", d.map_dc.c2)};
    if (cfg.has("alpha.ac")) p.alpha_ac = AlphaCurve(cfg.get_pairs("alpha.ac"));
    if (cfg.has("alpha.dc")) p.alpha_dc = AlphaCurve(cfg.get_pairs("alpha.dc"));
    if (!(p.gamma >= 1.0)) throw std::runtime_error("config: strategy.gamma must be >= 1");
    if (!(p.v_100 > 0.0)) throw std::runtime_error("config: pack.v_100 must be > 0");
    if (!(p.t_debounce_s >= 0.0))
        throw std::runtime_error("config: strategy.t_debounce_s must be >= 0");
    return p;
}

// Shared cell model; per-profile starting SOC is set by the caller.
inline EcmCell to_cell(const Config &cfg) {
    EcmCell cell;
    cell.capacity_ah = cfg.get_double_or("pack.capacity_ah", cell.capacity_ah);
    cell.r0 = cfg.get_double_or("cell.r0_ohm", cell.r0);
    cell.r1 = cfg.get_double_or("cell.r1_ohm", cell.r1);
    cell.c1 = cfg.get_double_or("cell.c1_f", cell.c1);
    if (cfg.has("cell.ocv")) cell.ocv = OcvCurve{cfg.get_pairs("cell.ocv")};
    cell.validate();
    return cell;
}

inline void encode_strategy_params(Config &cfg, const StrategyParams &p) {
    cfg.set("pack.v_100", p.v_100);
    cfg.set("pack.capacity_ah", p.capacity_ah);
    cfg.set("strategy.gamma", p.gamma);
    cfg.set("strategy.t_debounce_s", p.t_debounce_s);
    cfg.set("strategy.denom_epsilon_v", p.denom_epsilon);
    cfg.set("detector.ac.c0", p.map_ac.c0);
    cfg.set("detector.ac.c1", p.map_ac.c1);
    cfg.set("detector.ac.c2", p.map_ac.c2);
    cfg.set("detector.dc.c0", p.map_dc.c0);
    cfg.set("detector.dc.c1", p.map_dc.c1);
    cfg.set("detector.dc.c2", p.map_dc.c2);
    cfg.set_pairs("alpha.ac", p.alpha_ac.knots);
    cfg.set_pairs("alpha.dc", p.alpha_dc.knots);
}

inline void encode_cell(Config &cfg, const EcmCell &cell) {
    cfg.set("cell.r0_ohm", cell.r0);
    cfg.set("cell.r1_ohm", cell.r1);
    cfg.set("cell.c1_f", cell.c1);
    cfg.set_pairs("cell.ocv", cell.ocv.knots);
}

}  // namespace chargeend

#endif  // CHARGEEND_CONFIG_HPP
