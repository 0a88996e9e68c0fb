/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_DETECTOR_HPP
#define CHARGEEND_DETECTOR_HPP

#include <optional>

#include "chargeend/profile.hpp"

namespace chargeend {

// Affine mapping from cell temperatures to the activation voltage
// threshold. c1 = c2 = 0 gives a fixed threshold.
struct ThresholdMap {
    double c0 = 0.0;  // V
    double c1 = 0.0;  // V/degC on t_min
    double c2 = 0.0;  // V/degC on t_max

    double eval(double t_min, double t_max) const { return c0 + c1 * t_min + c2 * t_max; }
};

// Returns the active threshold for a charging mode, nothing otherwise.
inline std::optional<double> threshold_for(const ThresholdMap &map_ac, const ThresholdMap &map_dc,
                                           BmsMode mode, double t_min, double t_max) {
    switch (mode) {
        case BmsMode::AcCharge: return map_ac.eval(t_min, t_max);
        case BmsMode::DcCharge: return map_dc.eval(t_min, t_max);
        default: return std::nullopt;
    }
}

struct DetectorState {
    std::optional<double> above_since;     // time v_max first exceeded the threshold, s
    bool active = false;
    std::optional<BmsMode> last_mode;      // debounce timer resets on mode change
};

// One detector update. Strictly-above comparison; the debounce timer runs
// on wall time and clears the moment the input condition drops, so the
// output is not latched.
inline DetectorState step_detector(DetectorState state, const ChargeSample &sample,
                                   const ThresholdMap &map_ac, const ThresholdMap &map_dc,
                                   double t_debounce_s, double now_s) {
    const auto thr = threshold_for(map_ac, map_dc, sample.mode, sample.t_min, sample.t_max);
    if (!thr) {
        return DetectorState{std::nullopt, false, sample.mode};
    }
    if (state.last_mode != sample.mode) state.above_since.reset();
    state.last_mode = sample.mode;
    if (sample.v_max > *thr) {
        if (!state.above_since) state.above_since = now_s;
        state.active = now_s - *state.above_since >= t_debounce_s;
    } else {
        state.above_since.reset();
        state.active = false;
    }
    return state;
}

}  // namespace chargeend

#endif  // CHARGEEND_DETECTOR_HPP
