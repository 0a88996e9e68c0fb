/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_CELLSIM_HPP
#define CHARGEEND_CELLSIM_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chargeend/baseline.hpp"
#include "chargeend/profile.hpp"

namespace chargeend {

// Open-circuit voltage as a table of (soc %, volts) knots, strictly
// increasing in both coordinates and spanning 0..100%.
struct OcvCurve {
    std::vector<std::pair<double, double>> knots;

    static OcvCurve default_curve() {
        return OcvCurve{{{0.0, 3.00},
                         {10.0, 3.45},
                         {20.0, 3.55},
                         {30.0, 3.62},
                         {40.0, 3.67},
                         {50.0, 3.71},
                         {60.0, 3.76},
                         {70.0, 3.82},
                         {80.0, 3.90},
                         {90.0, 4.03},
                         {100.0, 4.20}}};
    }

    void validate() const {
        if (knots.size() < 2) throw std::invalid_argument("OcvCurve: need at least 2 knots");
        if (knots.front().first != 0.0 || knots.back().first != 100.0)
            throw std::invalid_argument("OcvCurve: knots must span 0..100% SOC");
        for (size_t i = 1; i < knots.size(); ++i) {
            if (!(knots[i].first > knots[i - 1].first && knots[i].second > knots[i - 1].second))
                throw std::invalid_argument("OcvCurve: knots must strictly increase");
        }
    }

    double eval(double soc) const {
        if (soc <= knots.front().first) return knots.front().second;
        if (soc >= knots.back().first) return knots.back().second;
        for (size_t i = 1; i < knots.size(); ++i) {
            if (soc <= knots[i].first) {
                const double w =
                    (soc - knots[i - 1].first) / (knots[i].first - knots[i - 1].first);
                return knots[i - 1].second + w * (knots[i].second - knots[i - 1].second);
            }
        }
        return knots.back().second;
    }
};

// First-order RC equivalent-circuit cell. The pack's maximum cell voltage
// is this cell's terminal voltage plus a fixed imbalance offset.
struct EcmCell {
    double capacity_ah = 100.0;
    OcvCurve ocv = OcvCurve::default_curve();
    double r0 = 0.0003;      // ohm, series resistance
    double r1 = 0.0002;      // ohm, RC branch
    double c1 = 50000.0;     // F, RC branch (tau = r1*c1 = 10 s)
    double soc_true = 0.0;   // %
    double v_rc = 0.0;       // V, RC branch state
    double temp_c = 25.0;

    void validate() const {
        if (!(capacity_ah > 0.0 && r0 > 0.0 && r1 > 0.0 && c1 > 0.0))
            throw std::invalid_argument("EcmCell: capacity, r0, r1, c1 must be > 0");
        if (!(soc_true >= 0.0 && soc_true <= 100.0))
            throw std::invalid_argument("EcmCell: soc_true outside [0, 100]");
        ocv.validate();
    }
};

struct StepCellResult {
    EcmCell cell;
    double terminal_v = 0.0;
};

// Advances SOC by the shared rectangular rule and the RC state by its
// exact discrete solution, then reports the loaded terminal voltage.
inline StepCellResult step_cell(EcmCell cell, double current_a, double dt_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("step_cell: dt must be > 0");
    cell.soc_true = integrate_soc(cell.soc_true, current_a, dt_s, cell.capacity_ah, 1.0);
    const double decay = std::exp(-dt_s / (cell.r1 * cell.c1));
    cell.v_rc = cell.v_rc * decay + cell.r1 * (1.0 - decay) * current_a;
    const double vt = cell.ocv.eval(cell.soc_true) + cell.v_rc + cell.r0 * current_a;
    return {cell, vt};
}

// AC wall charging is plain CC-CV; DC fast charging steps the current down
// through SOC bands and finishes on the voltage limit.
struct ChargerSpec {
    enum class Kind { AcCcCv, DcMultiStep };
    Kind kind = Kind::AcCcCv;
    double cc_current_a = 10.0;  // AC constant-current setpoint
    std::vector<std::pair<double, double>> steps;  // DC: (soc upper bound %, current A)
    double cv_voltage_v = 4.20;
    double cutoff_current_a = 0.5;

    double setpoint(double soc) const {
        if (kind == Kind::AcCcCv) return cc_current_a;
        for (const auto &[upper, current] : steps) {
            if (soc < upper) return current;
        }
        return steps.back().second;
    }

    void validate(double v_100) const {
        if (!(cutoff_current_a > 0.0))
            throw std::invalid_argument("ChargerSpec: cutoff_current_a must be > 0");
        if (!(cv_voltage_v >= v_100))
            throw std::invalid_argument("ChargerSpec: cv_voltage_v must be >= v_100");
        if (kind == Kind::AcCcCv) {
            if (!(cc_current_a > 0.0))
                throw std::invalid_argument("ChargerSpec: cc_current_a must be > 0");
        } else {
            if (steps.empty()) throw std::invalid_argument("ChargerSpec: empty DC step table");
            for (size_t i = 0; i < steps.size(); ++i) {
                if (!(steps[i].second > 0.0))
                    throw std::invalid_argument("ChargerSpec: step currents must be > 0");
                if (i > 0 && !(steps[i].first > steps[i - 1].first))
                    throw std::invalid_argument("ChargerSpec: step bounds must strictly increase");
            }
        }
    }
};

// (t_min, t_max) cell temperatures as a function of time.
using TempTrace = std::function<std::pair<double, double>(double)>;

inline TempTrace constant_temps(double t_min_c, double t_max_c) {
    return [t_min_c, t_max_c](double) { return std::make_pair(t_min_c, t_max_c); };
}

struct SimOptions {
    double pack_imbalance_v = 0.0;  // added to the cell terminal voltage
    long max_steps = 2'000'000;
};

struct SimResult {
    ChargeProfile profile;
    std::vector<double> true_soc;  // %, parallel to profile.samples
};

// Runs the cell against the charger until the charge-complete condition
// (measured voltage at the CV limit, current at or under the cutoff).
// The CV phase solves the terminal-voltage equation for current each
// sample, which holds the measured voltage at the limit exactly.
inline SimResult generate_profile(EcmCell cell, const ChargerSpec &charger, double dt_s,
                                  const TempTrace &temps, double v_100,
                                  const SimOptions &opts = {}) {
    cell.validate();
    charger.validate(v_100);
    if (!(dt_s > 0.0)) throw std::invalid_argument("generate_profile: dt must be > 0");
    if (!(cell.soc_true < 100.0))
        throw std::invalid_argument("generate_profile: initial SOC must be < 100%");

    const BmsMode mode =
        charger.kind == ChargerSpec::Kind::AcCcCv ? BmsMode::AcCharge : BmsMode::DcCharge;
    SimResult result;
    result.profile.capacity_ah = cell.capacity_ah;
    result.profile.v_100 = v_100;

    const double cv = charger.cv_voltage_v;
    for (long step = 0; step < opts.max_steps; ++step) {
        const double t = static_cast<double>(step) * dt_s;
        const double base_v = cell.ocv.eval(cell.soc_true) + cell.v_rc + opts.pack_imbalance_v;
        double current = charger.setpoint(cell.soc_true);
        double v_meas;
        if (base_v + cell.r0 * current > cv) {
            // voltage limit reached: solve the terminal-voltage equation for
            // the current; the measured voltage sits on the limit exactly
            current = (cv - base_v) / cell.r0;
            v_meas = cv;
            if (current <= 0.0) {  // already at or above the limit at rest
                current = 0.0;
                v_meas = base_v;
            }
        } else {
            v_meas = base_v + cell.r0 * current;
        }

        const auto [t_min, t_max] = temps(t);
        result.profile.samples.push_back({t, current, v_meas, t_min, t_max, mode});
        result.true_soc.push_back(cell.soc_true);

        if (v_meas >= cv && current <= charger.cutoff_current_a) {
            if (cell.soc_true < 99.9)
                throw std::runtime_error(
                    "generate_profile: charge completed below 99.9% true SOC; "
                    "lower the cutoff current or raise the CV voltage");
            return result;
        }
        cell = step_cell(cell, current, dt_s).cell;
    }
    throw std::runtime_error("generate_profile: charge did not complete within the step budget");
}

}  // namespace chargeend

#endif  // CHARGEEND_CELLSIM_HPP
