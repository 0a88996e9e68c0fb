/*
 * Copyright (c) The chargeend Project Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "chargeend/profile.hpp"
#include "test_util.hpp"

using namespace chargeend;
using testutil::TempDir;

TEST_CASE("c_rate follows |current| / capacity", "[profile]") {
    CHECK(c_rate(50.0, 100.0) == Catch::Approx(0.5));
    CHECK(c_rate(0.0, 100.0) == 0.0);
    CHECK(c_rate(-20.0, 80.0) == Catch::Approx(0.25));
    CHECK_THROWS_AS(c_rate(10.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(c_rate(10.0, -5.0), std::invalid_argument);
}

TEST_CASE("c_rate is nonnegative and linear in |current|", "[profile]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amps(-200.0, 200.0);
    std::uniform_real_distribution<double> caps(1.0, 300.0);
    std::uniform_real_distribution<double> scale(0.1, 8.0);
    for (int i = 0; i < 500; ++i) {
        const double current = amps(rng), capacity = caps(rng), k = scale(rng);
        const double base = c_rate(current, capacity);
        CHECK(base >= 0.0);
        CHECK(c_rate(k * current, capacity) ==
              Catch::Approx(k * base).epsilon(1e-12).margin(1e-15));
    }
}

TEST_CASE("well-formed profile CSV loads row by row", "[profile]") {
    TempDir tmp;
    const std::string path = tmp.file("p.csv");
    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,50,3.9,18,24,DC_CHARGE\n"
                         "1,49.5,3.91,18,24,DC_CHARGE\n"
                         "2,49,3.92,18,24,AC_CHARGE\n");
    const ChargeProfile p = load_profile_csv(path);
    REQUIRE(p.samples.size() == 3);
    CHECK(p.capacity_ah == 100.0);
    CHECK(p.v_100 == 4.2);
    CHECK(p.samples[0].t == 0.0);
    CHECK(p.samples[1].t == 1.0);
    CHECK(p.samples[2].t == 2.0);
    CHECK(p.samples[0].mode == BmsMode::DcCharge);
    CHECK(p.samples[2].mode == BmsMode::AcCharge);
    CHECK(p.samples[1].current == 49.5);
    for (size_t k = 1; k < p.samples.size(); ++k)
        CHECK(p.samples[k].t - p.samples[k - 1].t > 0.0);
}

TEST_CASE("non-monotone timestamps are rejected with the row number", "[profile]") {
    TempDir tmp;
    const std::string path = tmp.file("bad.csv");
    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,1,3.9,20,25,DC_CHARGE\n"
                         "5,1,3.9,20,25,DC_CHARGE\n"
                         "3,1,3.9,20,25,DC_CHARGE\n");
    CHECK_THROWS_WITH(load_profile_csv(path), Catch::Matchers::ContainsSubstring("row 3"));
}

TEST_CASE("malformed rows are rejected with the row number", "[profile]") {
    TempDir tmp;
    const std::string path = tmp.file("bad.csv");
    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,1,3.9,20,25,DC_CHARGE\n"
                         "1,1,3.9,20,25\n");
    CHECK_THROWS_WITH(load_profile_csv(path), Catch::Matchers::ContainsSubstring("row 2"));

    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,banana,3.9,20,25,DC_CHARGE\n");
    CHECK_THROWS_WITH(load_profile_csv(path), Catch::Matchers::ContainsSubstring("row 1"));

    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,1,3.9,20,25,TRICKLE\n");
    CHECK_THROWS_WITH(load_profile_csv(path), Catch::Matchers::ContainsSubstring("TRICKLE"));
}

TEST_CASE("profile CSV requires pack metadata and header", "[profile]") {
    TempDir tmp;
    const std::string path = tmp.file("meta.csv");
    testutil::write_text(path,
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,1,3.9,20,25,DC_CHARGE\n");
    CHECK_THROWS_WITH(load_profile_csv(path), Catch::Matchers::ContainsSubstring("capacity_ah"));

    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "0,1,3.9,20,25,DC_CHARGE\n");
    CHECK_THROWS_AS(load_profile_csv(path), std::runtime_error);

    CHECK_THROWS_AS(load_profile_csv(tmp.file("missing.csv")), std::runtime_error);
}

TEST_CASE("sample invariants are enforced on load", "[profile]") {
    TempDir tmp;
    const std::string path = tmp.file("inv.csv");
    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,1,-0.5,20,25,DC_CHARGE\n");
    CHECK_THROWS_WITH(load_profile_csv(path), Catch::Matchers::ContainsSubstring("v_max"));

    testutil::write_text(path,
                         "# capacity_ah = 100\n"
                         "# v_100 = 4.2\n"
                         "time_s,current_a,v_max_v,t_min_c,t_max_c,mode\n"
                         "0,1,3.9,30,25,DC_CHARGE\n");
    CHECK_THROWS_WITH(load_profile_csv(path), Catch::Matchers::ContainsSubstring("t_min"));
}

TEST_CASE("trace CSV writes header plus one row per step", "[profile]") {
    TempDir tmp;
    const std::string path = tmp.file("trace.csv");

    write_trace_csv(path, {});
    std::istringstream empty(testutil::read_text(path));
    std::string line;
    int lines = 0;
    while (std::getline(empty, line)) ++lines;
    CHECK(lines == 1);

    std::vector<StepOutput> rows(2);
    rows[0] = {-10.0, 70.0, 70.0, 70.0, false};
    rows[1] = {0.0, 80.123456, 95.5, 90.25, true};
    write_trace_csv(path, rows);
    std::istringstream two(testutil::read_text(path));
    lines = 0;
    while (std::getline(two, line)) ++lines;
    CHECK(lines == 3);
}

TEST_CASE("trace CSV round-trips within 1e-6", "[profile]") {
    TempDir tmp;
    const std::string path = tmp.file("trace.csv");
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> soc(0.0, 100.0);
    std::uniform_real_distribution<double> t(-9000.0, 0.0);
    std::vector<StepOutput> rows;
    for (int i = 0; i < 50; ++i)
        rows.push_back({t(rng), soc(rng), soc(rng), soc(rng), i % 3 == 0});

    write_trace_csv(path, rows);
    const auto loaded = read_trace_csv(path);
    REQUIRE(loaded.size() == rows.size());
    for (size_t k = 0; k < rows.size(); ++k) {
        CHECK(loaded[k].time_s == Catch::Approx(rows[k].time_s).margin(1e-6));
        CHECK(loaded[k].soc_baseline == Catch::Approx(rows[k].soc_baseline).margin(1e-6));
        CHECK(loaded[k].soc_vb == Catch::Approx(rows[k].soc_vb).margin(1e-6));
        CHECK(loaded[k].soc_corr == Catch::Approx(rows[k].soc_corr).margin(1e-6));
        CHECK(loaded[k].active == rows[k].active);
    }
}

TEST_CASE("profile CSV round-trips within 1e-6 per field", "[profile]") {
    TempDir tmp;
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> amps(0.0, 150.0);
    std::uniform_real_distribution<double> volts(3.0, 4.4);
    std::uniform_real_distribution<double> temp(-10.0, 45.0);
    std::uniform_real_distribution<double> dt(0.1, 30.0);
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> mode(0, 3);

    for (int rep = 0; rep < 25; ++rep) {
        ChargeProfile p;
        p.capacity_ah = 50.0 + amps(rng);
        p.v_100 = 4.0 + 0.3 * dt(rng) / 30.0;
        double t = 0.0;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) {
            ChargeSample s;
            s.t = t;
            s.current = amps(rng);
            s.v_max = volts(rng);
            s.t_min = temp(rng);
            s.t_max = s.t_min + 0.5 * dt(rng);
            s.mode = static_cast<BmsMode>(mode(rng));
            p.samples.push_back(s);
            t += dt(rng);
        }
        const std::string path = tmp.file("roundtrip.csv");
        write_profile_csv(path, p);
        const ChargeProfile q = load_profile_csv(path);
        REQUIRE(q.samples.size() == p.samples.size());
        CHECK(q.capacity_ah == Catch::Approx(p.capacity_ah).margin(1e-6));
        CHECK(q.v_100 == Catch::Approx(p.v_100).margin(1e-6));
        for (size_t k = 0; k < p.samples.size(); ++k) {
            CHECK(q.samples[k].t == Catch::Approx(p.samples[k].t).margin(1e-6));
            CHECK(q.samples[k].current == Catch::Approx(p.samples[k].current).margin(1e-6));
            CHECK(q.samples[k].v_max == Catch::Approx(p.samples[k].v_max).margin(1e-6));
            CHECK(q.samples[k].t_min == Catch::Approx(p.samples[k].t_min).margin(1e-6));
            CHECK(q.samples[k].t_max == Catch::Approx(p.samples[k].t_max).margin(1e-6));
            CHECK(q.samples[k].mode == p.samples[k].mode);
        }
    }
}
