/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_BASELINE_HPP
#define CHARGEEND_BASELINE_HPP

#include <algorithm>
#include <stdexcept>

#include "chargeend/profile.hpp"

namespace chargeend {

struct BaselineState {
    double soc = 0.0;          // %
    double capacity_ah = 0.0;  // Ah
    double coulombic_efficiency = 1.0;
};

// Left-endpoint rectangular rule shared by the baseline, the cell simulator
// and backward coulomb counting, so conservation checks are exact.
inline double integrate_soc(double soc, double current_a, double dt_s, double capacity_ah,
                            double eta) {
    const double gain = current_a > 0.0 ? eta : 1.0;
    return std::clamp(soc + 100.0 * gain * current_a * dt_s / (3600.0 * capacity_ah), 0.0, 100.0);
}

inline BaselineState init_baseline(double soc0, double capacity_ah, double eta) {
    if (!(soc0 >= 0.0 && soc0 <= 100.0))
        throw std::invalid_argument("init_baseline: soc0 must be in [0, 100]");
    if (!(capacity_ah > 0.0))
        throw std::invalid_argument("init_baseline: capacity_ah must be > 0");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("init_baseline: eta must be in (0, 1]");
    return BaselineState{soc0, capacity_ah, eta};
}

// Snap rule: reported SOC jumps to 100% once the maximum cell voltage
// reaches v_100. Disable by passing v_100 = +infinity.
inline double snapped_soc(const BaselineState &state, double v_max, double v_100) {
    return v_max >= v_100 ? 100.0 : state.soc;
}

// Applies sample.current over dt, then the v_100 snap against sample.v_max.
inline BaselineState step_baseline(BaselineState state, const ChargeSample &sample, double dt_s,
                                   double v_100) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("step_baseline: dt must be > 0");
    state.soc = integrate_soc(state.soc, sample.current, dt_s, state.capacity_ah,
                              state.coulombic_efficiency);
    state.soc = snapped_soc(state, sample.v_max, v_100);
    return state;
}

}  // namespace chargeend

#endif  // CHARGEEND_BASELINE_HPP
