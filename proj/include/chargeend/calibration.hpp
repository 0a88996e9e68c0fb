/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef CHARGEEND_CALIBRATION_HPP
#define CHARGEEND_CALIBRATION_HPP

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chargeend/detector.hpp"
#include "chargeend/profile.hpp"

namespace chargeend {

// Where along a training profile the threshold anchor is taken: either at a
// backward-counted SOC level, or a fixed time-to-charge before completion.
struct AnchorRule {
    enum class Kind { SocThreshold, TtcThreshold };
    Kind kind = Kind::SocThreshold;
    double value = 80.0;  // % for SocThreshold, seconds for TtcThreshold

    static AnchorRule soc_threshold(double pct) {
        if (!(pct > 0.0 && pct < 100.0))
            throw std::invalid_argument("soc_threshold must be in (0, 100)");
        return AnchorRule{Kind::SocThreshold, pct};
    }
    static AnchorRule ttc_threshold(double seconds) {
        if (!(seconds > 0.0)) throw std::invalid_argument("ttc_threshold must be > 0");
        return AnchorRule{Kind::TtcThreshold, seconds};
    }
};

struct Anchor {
    double v_max = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
};

// SOC trace reconstructed by integrating current backwards from the
// charge-end sample, which is pinned at 100%. Same rectangular rule as
// the forward baseline.
inline std::vector<double> backward_soc(const ChargeProfile &profile) {
    const auto &s = profile.samples;
    if (s.empty()) throw std::invalid_argument("backward_soc: empty profile");
    std::vector<double> soc(s.size());
    soc.back() = 100.0;
    for (size_t k = s.size() - 1; k-- > 0;) {
        const double dt = s[k + 1].t - s[k].t;
        soc[k] = soc[k + 1] - 100.0 * s[k].current * dt / (3600.0 * profile.capacity_ah);
    }
    return soc;
}

inline Anchor anchor_point(const ChargeProfile &profile, const AnchorRule &rule) {
    const auto &s = profile.samples;
    if (s.empty()) throw std::invalid_argument("anchor_point: empty profile");
    if (rule.kind == AnchorRule::Kind::SocThreshold) {
        const auto soc = backward_soc(profile);
        for (size_t k = 0; k < s.size(); ++k) {
            if (soc[k] >= rule.value) return Anchor{s[k].v_max, s[k].t_min, s[k].t_max};
        }
        throw std::runtime_error("anchor_point: backward SOC never reaches threshold");
    }
    const double target = s.back().t - rule.value;
    if (s.front().t > target)
        throw std::runtime_error("anchor_point: profile shorter than ttc_threshold");
    size_t best = 0;
    for (size_t k = 0; k < s.size(); ++k) {
        if (s[k].t <= target) best = k;
    }
    return Anchor{s[best].v_max, s[best].t_min, s[best].t_max};
}

// Ordinary least squares of anchor voltage on (1, t_min, t_max) via the
// centered normal equations. Falls back to the fixed-threshold mean when
// the temperature spread is rank deficient or there are too few anchors.
inline ThresholdMap fit_threshold_map(const std::vector<Anchor> &anchors) {
    if (anchors.empty()) throw std::invalid_argument("fit_threshold_map: no anchors");
    const double n = static_cast<double>(anchors.size());
    double mv = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto &a : anchors) {
        mv += a.v_max;
        m1 += a.t_min;
        m2 += a.t_max;
    }
    mv /= n;
    m1 /= n;
    m2 /= n;
    if (anchors.size() < 3) return ThresholdMap{mv, 0.0, 0.0};

    double s11 = 0.0, s12 = 0.0, s22 = 0.0, s1y = 0.0, s2y = 0.0;
    for (const auto &a : anchors) {
        const double x1 = a.t_min - m1;
        const double x2 = a.t_max - m2;
        const double y = a.v_max - mv;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        s1y += x1 * y;
        s2y += x2 * y;
    }
    const double det = s11 * s22 - s12 * s12;
    const double scale = std::max(s11, s22);
    if (!(scale > 0.0) || det <= 1e-10 * scale * scale) return ThresholdMap{mv, 0.0, 0.0};

    const double c1 = (s22 * s1y - s12 * s2y) / det;
    const double c2 = (s11 * s2y - s12 * s1y) / det;
    return ThresholdMap{mv - c1 * m1 - c2 * m2, c1, c2};
}

// Mixing-coefficient curve: knots of (C-rate, alpha), interpolated
// piecewise-linearly and clamped at the ends. Alpha never increases with
// C-rate.
struct AlphaCurve {
    std::vector<std::pair<double, double>> knots;

    AlphaCurve() = default;
    explicit AlphaCurve(std::vector<std::pair<double, double>> k) : knots(std::move(k)) {
        validate();
    }

    void validate() const {
        if (knots.empty()) throw std::invalid_argument("AlphaCurve: no knots");
        for (size_t i = 0; i < knots.size(); ++i) {
            if (!(knots[i].second >= 0.0 && knots[i].second <= 1.0))
                throw std::invalid_argument("AlphaCurve: alpha must be in [0, 1]");
            if (i > 0) {
                if (!(knots[i].first > knots[i - 1].first))
                    throw std::invalid_argument("AlphaCurve: c_rate knots must strictly increase");
                if (knots[i].second > knots[i - 1].second)
                    throw std::invalid_argument("AlphaCurve: alpha must be non-increasing");
            }
        }
    }
};

inline double alpha_at(const AlphaCurve &curve, double c_rate) {
    const auto &k = curve.knots;
    if (k.empty()) throw std::invalid_argument("alpha_at: empty curve");
    if (c_rate <= k.front().first) return k.front().second;
    if (c_rate >= k.back().first) return k.back().second;
    for (size_t i = 1; i < k.size(); ++i) {
        if (c_rate <= k[i].first) {
            const double w = (c_rate - k[i - 1].first) / (k[i].first - k[i - 1].first);
            return k[i - 1].second + w * (k[i].second - k[i - 1].second);
        }
    }
    return k.back().second;
}

}  // namespace chargeend

#endif  // CHARGEEND_CALIBRATION_HPP
