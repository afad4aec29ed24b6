#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "scout/error.hpp"
#include "scout/mathutil.hpp"
#include "scout/qc.hpp"

using namespace scout;
using testutil::constant_series;
using testutil::make_series;

TEST_CASE("strip_initialization invalidates the warm-up window") {
    QCConfig cfg;
    auto s = constant_series(0.0, 10.0, 40, 2500.0);
    auto out = strip_initialization(s, cfg);
    CHECK(out.valid_count() == 40 - 18);  // 180 s at 10 s cadence
    CHECK_FALSE(out.is_valid(17));
    CHECK(out.is_valid(18));

    QCConfig zero = cfg;
    zero.warmup_s = 0.0;
    auto identity = strip_initialization(s, zero);
    CHECK(identity.valid_count() == 40);

    auto tiny = constant_series(0.0, 10.0, 5, 2500.0);
    CHECK(strip_initialization(tiny, cfg).valid_count() == 0);  // shorter than warm-up
}

TEST_CASE("classify_scout partitions samples with drop precedence") {
    QCConfig cfg;
    cfg.warmup_s = 0.0;  // isolate the value rules
    auto s = make_series(1000.0, 10.0, {50000.0, 999.0, 999.0, 2500.0, 51000.0});
    s.set_invalid(3);
    IntervalSet drops;
    drops.add({1020.0, 1030.0});  // covers index 2 only
    auto cls = classify_scout(s, cfg, drops);
    CHECK(cls[0] == SampleClass::saturated);
    CHECK(cls[1] == SampleClass::low);
    CHECK(cls[2] == SampleClass::drop_event);  // low value inside a drop interval
    CHECK(cls[3] == SampleClass::missing);
    CHECK(cls[4] == SampleClass::saturated);
}

TEST_CASE("classify_scout marks invalid warm-up samples as warmup") {
    QCConfig cfg;
    auto s = constant_series(0.0, 10.0, 30, 2500.0);
    auto stripped = strip_initialization(s, cfg);
    auto cls = classify_scout(stripped, cfg, {});
    CHECK(cls[0] == SampleClass::warmup);
    CHECK(cls[17] == SampleClass::warmup);
    CHECK(cls[18] == SampleClass::valid);
}

TEST_CASE("classification is a partition (property)") {
    QCConfig cfg;
    num::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 50 + static_cast<std::size_t>(rng.uniform(0, 200));
        Series s = Series::uniform(0.0, 10.0, n, Unit::ppm);
        for (std::size_t i = 0; i < n; ++i)
            if (rng.u01() > 0.1) s.set(i, rng.uniform(0.0, 55000.0));
        IntervalSet drops;
        if (rng.u01() > 0.5) drops.add({100.0, 300.0});
        auto cls = classify_scout(s, cfg, drops);
        auto rep = retention_report(cls);
        std::size_t sum = 0;
        for (auto c : rep.counts) sum += c;
        CHECK(sum == n);
    }
}

TEST_CASE("detect_pump_resets finds maximal sub-threshold spans") {
    QCConfig cfg;
    auto steady = constant_series(0.0, 1.0, 100, 1.1, Unit::l_min);
    CHECK(detect_pump_resets(steady, cfg).empty());

    auto dip = constant_series(0.0, 1.0, 100, 1.1, Unit::l_min);
    for (std::size_t i = 40; i < 50; ++i) dip.set(i, 0.2);
    auto events = detect_pump_resets(dip, cfg);
    REQUIRE(events.size() == 1);
    CHECK(events[0].start == doctest::Approx(40.0));
    CHECK(events[0].length() == doctest::Approx(10.0));

    auto twice = constant_series(0.0, 1.0, 100, 1.1, Unit::l_min);
    for (std::size_t i = 30; i < 35; ++i) twice.set(i, 0.3);
    for (std::size_t i = 40; i < 44; ++i) twice.set(i, 0.3);  // 5 s above threshold between
    CHECK(detect_pump_resets(twice, cfg).size() == 2);
}

TEST_CASE("apply_exclusions pads, merges and respects the flow floor") {
    QCConfig cfg;
    auto s = constant_series(0.0, 1.0, 200, 50.0);
    auto flow = constant_series(0.0, 1.0, 200, 1.1, Unit::l_min);
    IntervalSet events;
    events.add({100.0, 110.0});
    auto out = apply_exclusions(s, events, flow, cfg);
    // padded window [98, 150)
    CHECK(out.classes[97] == SampleClass::valid);
    CHECK(out.classes[98] == SampleClass::excluded_artifact);
    CHECK(out.classes[149] == SampleClass::excluded_artifact);
    CHECK(out.classes[150] == SampleClass::valid);

    auto identity = apply_exclusions(s, {}, flow, cfg);
    CHECK(identity.series.valid_count() == 200);

    IntervalSet overlapping;
    overlapping.add({50.0, 52.0});
    overlapping.add({60.0, 62.0});  // padded windows overlap -> merged
    auto merged = apply_exclusions(s, overlapping, flow, cfg);
    CHECK(merged.padded_events.size() == 1);

    auto slow_flow = flow;
    slow_flow.set(5, 0.5);
    auto flow_out = apply_exclusions(s, {}, slow_flow, cfg);
    CHECK(flow_out.classes[5] == SampleClass::excluded_flow);
    CHECK_FALSE(flow_out.series.is_valid(5));
}

TEST_CASE("apply_exclusions is idempotent and never unexcludes (property)") {
    QCConfig cfg;
    num::Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 300;
        Series s = Series::uniform(0.0, 1.0, n, Unit::ppm);
        Series flow = Series::uniform(0.0, 1.0, n, Unit::l_min);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.u01() > 0.05) s.set(i, rng.uniform(0.0, 100.0));
            flow.set(i, rng.u01() < 0.03 ? 0.2 : 1.1);
        }
        IntervalSet events;
        for (int e = 0; e < 3; ++e) {
            double a = rng.uniform(0.0, 250.0);
            events.add({a, a + rng.uniform(1.0, 20.0)});
        }
        auto once = apply_exclusions(s, events, flow, cfg);
        auto twice = apply_exclusions(once.series, events, flow, cfg);
        CHECK(once.series.valid == twice.series.valid);
        for (std::size_t i = 0; i < n; ++i)
            if (once.series.is_valid(i)) CHECK(s.is_valid(i));  // subset
    }
}

TEST_CASE("ambient_zero_check verifies the background band inclusively") {
    QCConfig cfg;
    CHECK(ambient_zero_check(constant_series(0, 1, 60, 1.9), cfg).pass);
    CHECK_FALSE(ambient_zero_check(constant_series(0, 1, 60, 5.0), cfg).pass);
    CHECK(ambient_zero_check(constant_series(0, 1, 60, 1.8), cfg).pass);  // inclusive bound
    Series dead = Series::uniform(0, 1, 10, Unit::ppm);
    CHECK_THROWS_AS(ambient_zero_check(dead, cfg), Error);
}

TEST_CASE("weekly_drift_check compares slope against the weekly budget") {
    QCConfig cfg;
    std::vector<std::pair<Timestamp, double>> flat{{0.0, 2.0}, {200000.0, 2.0}, {400000.0, 2.0}};
    auto ok = weekly_drift_check(flat, cfg);
    CHECK(ok.pass);
    CHECK(ok.weekly_frac == doctest::Approx(0.0));

    // 1.9 -> 2.1 ppm over exactly one week: 0.2 / week over mean 2.0 = 10%
    std::vector<std::pair<Timestamp, double>> steep{{0.0, 1.9}, {604800.0, 2.1}};
    auto bad = weekly_drift_check(steep, cfg);
    CHECK_FALSE(bad.pass);
    CHECK(bad.weekly_frac == doctest::Approx(0.1).epsilon(1e-9));

    std::vector<std::pair<Timestamp, double>> same{{0.0, 2.0}, {172800.0, 2.0}};
    CHECK(weekly_drift_check(same, cfg).pass);

    std::vector<std::pair<Timestamp, double>> narrow{{0.0, 2.0}, {3600.0, 2.0}};
    CHECK_THROWS_AS(weekly_drift_check(narrow, cfg), Error);
}

TEST_CASE("retention_report implements the retained-class definition") {
    std::vector<SampleClass> all_valid(50, SampleClass::valid);
    CHECK(retention_report(all_valid).retention_frac == doctest::Approx(1.0));

    std::vector<SampleClass> mixed;
    mixed.insert(mixed.end(), 60, SampleClass::valid);
    mixed.insert(mixed.end(), 20, SampleClass::saturated);
    mixed.insert(mixed.end(), 2, SampleClass::drop_event);
    mixed.insert(mixed.end(), 18, SampleClass::low);
    auto rep = retention_report(mixed);
    CHECK(rep.retention_frac == doctest::Approx(0.82));
    CHECK(rep.saturation_frac == doctest::Approx(0.20));
    CHECK(rep.drop_frac == doctest::Approx(0.02));
    CHECK(rep.low_frac == doctest::Approx(0.18));

    std::vector<SampleClass> gone(10, SampleClass::missing);
    CHECK_FALSE(retention_report(gone).defined);
}
