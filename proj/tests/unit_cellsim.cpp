/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chargeend/cellsim.hpp"

using namespace chargeend;

namespace {

EcmCell cell_at(double soc) {
    EcmCell cell;
    cell.soc_true = soc;
    return cell;
}

ChargerSpec ac_charger(double cc = 10.0, double cutoff = 0.5) {
    ChargerSpec c;
    c.kind = ChargerSpec::Kind::AcCcCv;
    c.cc_current_a = cc;
    c.cv_voltage_v = 4.20;
    c.cutoff_current_a = cutoff;
    return c;
}

ChargerSpec dc_charger() {
    ChargerSpec c;
    c.kind = ChargerSpec::Kind::DcMultiStep;
    c.steps = {{85, 60}, {92, 30}, {96, 10}, {98.5, 6}, {100, 3}};
    c.cv_voltage_v = 4.20;
    c.cutoff_current_a = 3.0;
    return c;
}

}  // namespace

TEST_CASE("resting cell reads its open-circuit voltage", "[cellsim]") {
    EcmCell cell = cell_at(50.0);
    const auto r = step_cell(cell, 0.0, 1.0);
    CHECK(r.terminal_v == Catch::Approx(cell.ocv.eval(50.0)).margin(1e-12));
    CHECK(r.cell.v_rc == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("36 s at 100 A on 100 Ah adds exactly 1%", "[cellsim]") {
    EcmCell cell = cell_at(50.0);
    const auto r = step_cell(cell, 100.0, 36.0);
    CHECK(r.cell.soc_true == Catch::Approx(51.0).margin(1e-12));
}

TEST_CASE("SOC clamps at 100 under continued charge", "[cellsim]") {
    EcmCell cell = cell_at(100.0);
    const auto r = step_cell(cell, 50.0, 3600.0);
    CHECK(r.cell.soc_true == 100.0);
}

TEST_CASE("RC state follows the exact discrete solution", "[cellsim]") {
    EcmCell cell = cell_at(60.0);
    cell.v_rc = 0.002;
    const double current = 30.0, dt = 1.0;
    const auto r = step_cell(cell, current, dt);

    // oracle: forward-Euler integration of c1 dv/dt = i - v/r1 at fine steps
    double v = 0.002;
    const int substeps = 100000;
    const double h = dt / substeps;
    for (int k = 0; k < substeps; ++k) v += h * (current - v / cell.r1) / cell.c1;
    CHECK(r.cell.v_rc == Catch::Approx(v).margin(1e-8));

    // analytic form for reference
    const double e = std::exp(-dt / (cell.r1 * cell.c1));
    CHECK(r.cell.v_rc == Catch::Approx(0.002 * e + cell.r1 * (1 - e) * current).margin(1e-15));
}

TEST_CASE("terminal voltage combines OCV, RC branch and ohmic drop", "[cellsim]") {
    EcmCell cell = cell_at(80.0);
    cell.v_rc = 0.001;
    const auto r = step_cell(cell, 10.0, 1.0);
    const double expected =
        cell.ocv.eval(r.cell.soc_true) + r.cell.v_rc + cell.r0 * 10.0;
    CHECK(r.terminal_v == Catch::Approx(expected).margin(1e-15));
}

TEST_CASE("OCV curve validates and interpolates", "[cellsim]") {
    const OcvCurve curve = OcvCurve::default_curve();
    CHECK_NOTHROW(curve.validate());
    CHECK(curve.eval(0.0) == 3.00);
    CHECK(curve.eval(100.0) == 4.20);
    CHECK(curve.eval(95.0) == Catch::Approx((4.03 + 4.20) / 2).margin(1e-12));

    OcvCurve bad{{{0.0, 3.0}, {50.0, 2.9}, {100.0, 4.2}}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    OcvCurve short_range{{{10.0, 3.0}, {100.0, 4.2}}};
    CHECK_THROWS_AS(short_range.validate(), std::invalid_argument);
}

TEST_CASE("AC profile is constant current then a monotone CV taper", "[cellsim]") {
    const auto sim = generate_profile(cell_at(20.0), ac_charger(), 10.0,
                                      constant_temps(20.0, 22.0), 4.2);
    const auto &s = sim.profile.samples;
    REQUIRE(s.size() > 100);

    size_t cv_start = s.size();
    for (size_t k = 0; k < s.size(); ++k) {
        if (s[k].current < 10.0 - 1e-9) {
            cv_start = k;
            break;
        }
    }
    REQUIRE(cv_start > 0);
    REQUIRE(cv_start < s.size());
    for (size_t k = 0; k < cv_start; ++k) REQUIRE(s[k].current == 10.0);
    for (size_t k = cv_start + 1; k < s.size(); ++k)
        REQUIRE(s[k].current <= s[k - 1].current + 1e-12);

    // during CV the measured voltage sits on the limit
    for (size_t k = cv_start; k < s.size(); ++k)
        REQUIRE(s[k].v_max == Catch::Approx(4.2).margin(0.005));

    CHECK(s.back().current <= 0.5);
    CHECK(sim.true_soc.back() >= 99.9);
}

TEST_CASE("true SOC trace is non-decreasing and ends full", "[cellsim]") {
    const auto sim = generate_profile(cell_at(40.0), dc_charger(), 1.0,
                                      constant_temps(18.0, 24.0), 4.2);
    for (size_t k = 1; k < sim.true_soc.size(); ++k)
        REQUIRE(sim.true_soc[k] >= sim.true_soc[k - 1]);
    CHECK(sim.true_soc.back() >= 99.9);
    CHECK(sim.profile.samples.back().current <= 3.0);
}

TEST_CASE("DC voltage stays under the limit until the final sample", "[cellsim]") {
    const auto sim = generate_profile(cell_at(40.0), dc_charger(), 1.0,
                                      constant_temps(18.0, 24.0), 4.2);
    const auto &s = sim.profile.samples;
    for (size_t k = 0; k + 1 < s.size(); ++k) REQUIRE(s[k].v_max < 4.2);
    CHECK(s.back().v_max >= 4.2);
}

TEST_CASE("charge bookkeeping matches a reference integrator", "[cellsim]") {
    for (const bool is_dc : {false, true}) {
        const auto sim = is_dc
                             ? generate_profile(cell_at(40.0), dc_charger(), 1.0,
                                                constant_temps(18.0, 24.0), 4.2)
                             : generate_profile(cell_at(20.0), ac_charger(), 10.0,
                                                constant_temps(20.0, 22.0), 4.2);
        const auto &s = sim.profile.samples;
        double integral = 0.0;  // rectangular rule, sample k over the interval it opens
        for (size_t k = 0; k + 1 < s.size(); ++k)
            integral += s[k].current * (s[k + 1].t - s[k].t);
        const double delta = 100.0 * integral / (3600.0 * sim.profile.capacity_ah);
        REQUIRE(sim.true_soc.back() - sim.true_soc.front() ==
                Catch::Approx(delta).margin(1e-9));
    }
}

TEST_CASE("current near charge end is below the CC setpoint", "[cellsim]") {
    // a top-up AC session, so the charge-end taper spans the tail window
    const auto sim = generate_profile(cell_at(93.0), ac_charger(), 10.0,
                                      constant_temps(20.0, 22.0), 4.2);
    const auto &s = sim.profile.samples;
    const double t_end = s.back().t;
    for (const auto &sample : s) {
        if (sample.t >= 0.9 * t_end) REQUIRE(sample.current < 10.0);
    }

    const auto dc = generate_profile(cell_at(40.0), dc_charger(), 1.0,
                                     constant_temps(18.0, 24.0), 4.2);
    const double dc_end = dc.profile.samples.back().t;
    for (const auto &sample : dc.profile.samples) {
        if (sample.t >= 0.9 * dc_end) REQUIRE(sample.current < 60.0);
    }
}

TEST_CASE("simulated profiles carry mode, temps and metadata", "[cellsim]") {
    const auto sim = generate_profile(cell_at(40.0), dc_charger(), 1.0,
                                      constant_temps(18.0, 24.0), 4.2);
    CHECK(sim.profile.capacity_ah == 100.0);
    CHECK(sim.profile.v_100 == 4.2);
    for (const auto &s : sim.profile.samples) {
        REQUIRE(s.mode == BmsMode::DcCharge);
        REQUIRE(s.t_min == 18.0);
        REQUIRE(s.t_max == 24.0);
    }
    const auto ac = generate_profile(cell_at(20.0), ac_charger(), 10.0,
                                     constant_temps(20.0, 22.0), 4.2);
    CHECK(ac.profile.samples.front().mode == BmsMode::AcCharge);
}

TEST_CASE("generate_profile rejects bad setups", "[cellsim]") {
    CHECK_THROWS_AS(generate_profile(cell_at(100.0), ac_charger(), 1.0,
                                     constant_temps(20.0, 22.0), 4.2),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_profile(cell_at(20.0), ac_charger(), 0.0,
                                     constant_temps(20.0, 22.0), 4.2),
                    std::invalid_argument);
    ChargerSpec low_cv = ac_charger();
    low_cv.cv_voltage_v = 4.1;  // below v_100
    CHECK_THROWS_AS(generate_profile(cell_at(20.0), low_cv, 1.0,
                                     constant_temps(20.0, 22.0), 4.2),
                    std::invalid_argument);

    SimOptions tiny_budget;
    tiny_budget.max_steps = 10;
    CHECK_THROWS_AS(generate_profile(cell_at(20.0), ac_charger(), 1.0,
                                     constant_temps(20.0, 22.0), 4.2, tiny_budget),
                    std::runtime_error);
}

TEST_CASE("a cutoff above the taper floor fails the full-charge guard", "[cellsim]") {
    // cutting off at 9.9 A stops moments after CV entry, far from full
    CHECK_THROWS_WITH(generate_profile(cell_at(20.0), ac_charger(10.0, 9.9), 10.0,
                                       constant_temps(20.0, 22.0), 4.2),
                      Catch::Matchers::ContainsSubstring("99.9"));
}

TEST_CASE("pack imbalance offsets the measured voltage", "[cellsim]") {
    ChargerSpec gentle;  // low-current tail keeps the guard satisfied at +0.5 mV
    gentle.kind = ChargerSpec::Kind::DcMultiStep;
    gentle.steps = {{80, 54}, {90, 27}, {95, 9}, {98, 5}, {100, 2}};
    gentle.cv_voltage_v = 4.20;
    gentle.cutoff_current_a = 2.0;
    SimOptions opts;
    opts.pack_imbalance_v = 0.0005;
    const auto sim = generate_profile(cell_at(40.0), gentle, 1.0,
                                      constant_temps(18.0, 24.0), 4.2, opts);
    const auto plain = generate_profile(cell_at(40.0), gentle, 1.0,
                                        constant_temps(18.0, 24.0), 4.2);
    // same charger state sequence early on, shifted voltage
    CHECK(sim.profile.samples.front().v_max ==
          Catch::Approx(plain.profile.samples.front().v_max + 0.0005).margin(1e-12));
    // the offset pack reaches the voltage limit sooner
    CHECK(sim.profile.samples.back().t < plain.profile.samples.back().t);
}
