/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_CORRECTOR_HPP
#define CHARGEEND_CORRECTOR_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "chargeend/calibration.hpp"
#include "chargeend/detector.hpp"
#include "chargeend/profile.hpp"

namespace chargeend {

// Every tunable of the charge-end strategy in one place.
struct StrategyParams {
    double v_100 = 4.20;          // V
    double gamma = 1.0;           // acceleration, >= 1
    double t_debounce_s = 30.0;   // s
    ThresholdMap map_ac{4.10, 0.0, 0.0};
    ThresholdMap map_dc{4.18, 0.0, 0.0};
    AlphaCurve alpha_ac{{{0.02, 1.0}, {0.06, 0.97}, {0.12, 0.92}, {0.25, 0.80}, {0.50, 0.50}}};
    AlphaCurve alpha_dc{{{0.03, 1.0}, {0.06, 0.95}, {0.12, 0.80}, {0.30, 0.50}, {0.60, 0.25},
                         {1.00, 0.10}}};
    double capacity_ah = 100.0;   // Ah, for the C-rate lookup
    double denom_epsilon = 1e-6;  // V, singular-denominator guard
};

inline DetectorState step_detector(DetectorState state, const ChargeSample &sample,
                                   const StrategyParams &params, double now_s) {
    return step_detector(state, sample, params.map_ac, params.map_dc, params.t_debounce_s, now_s);
}

struct CorrectorState {
    DetectorState detector;
    std::optional<double> prev_v_max;     // v_max(k-1), set while active
    std::optional<double> prev_soc_corr;  // soc_corr(k-1), set while active
    bool was_active = false;
};

// Voltage-based SOC estimate: linear interpolation between the previous
// corrected point and the (v_100, 100%) endpoint, scaled by gamma and
// clamped to [0, 100]. A vanishing denominator means the previous voltage
// already reached v_100, so the estimate is 100 outright.
inline double soc_vb(double prev_soc_corr, double prev_v_max, double v_max, double v_100,
                     double gamma, double denom_epsilon) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("soc_vb: gamma must be >= 1");
    const double denom = v_100 - prev_v_max;
    if (denom <= denom_epsilon) return 100.0;
    const double raw =
        prev_soc_corr + gamma * ((v_max - prev_v_max) / denom) * (100.0 - prev_soc_corr);
    return std::min(100.0, std::max(0.0, raw));
}

// Increase-only mixing: a convex combination when the voltage-based
// estimate is above the baseline, the baseline untouched otherwise.
inline double mix(double soc_vb_pct, double soc_baseline_pct, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("mix: alpha outside [0, 1]");
    if (soc_vb_pct > soc_baseline_pct)
        return alpha * soc_vb_pct + (1.0 - alpha) * soc_baseline_pct;
    return soc_baseline_pct;
}

struct CorrectorStep {
    CorrectorState state;
    StepOutput output;
};

// One full strategy update: advance the detector, then pass the baseline
// through, seed on the activation edge, or estimate-and-mix while active.
inline CorrectorStep step_corrector(CorrectorState state, const ChargeSample &sample,
                                    double soc_baseline, const StrategyParams &params,
                                    double now_s) {
    if (!(soc_baseline >= 0.0 && soc_baseline <= 100.0))
        throw std::invalid_argument("step_corrector: soc_baseline outside [0, 100]");

    state.detector = step_detector(state.detector, sample, params, now_s);

    StepOutput out;
    out.time_s = sample.t;
    out.soc_baseline = soc_baseline;
    out.active = state.detector.active;

    if (!state.detector.active) {
        out.soc_vb = soc_baseline;
        out.soc_corr = soc_baseline;
        state.prev_v_max.reset();
        state.prev_soc_corr.reset();
        state.was_active = false;
        return {state, out};
    }
    if (!state.was_active) {
        // activation edge: the strategy starts from the baseline estimate
        out.soc_vb = soc_baseline;
        out.soc_corr = soc_baseline;
        state.prev_v_max = sample.v_max;
        state.prev_soc_corr = soc_baseline;
        state.was_active = true;
        return {state, out};
    }
    const double vb = soc_vb(*state.prev_soc_corr, *state.prev_v_max, sample.v_max, params.v_100,
                             params.gamma, params.denom_epsilon);
    const AlphaCurve &curve =
        sample.mode == BmsMode::AcCharge ? params.alpha_ac : params.alpha_dc;
    const double alpha = alpha_at(curve, c_rate(sample.current, params.capacity_ah));
    const double corrected = mix(vb, soc_baseline, alpha);
    out.soc_vb = vb;
    out.soc_corr = corrected;
    state.prev_v_max = sample.v_max;
    state.prev_soc_corr = corrected;
    return {state, out};
}

}  // namespace chargeend

#endif  // CHARGEEND_CORRECTOR_HPP
