#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "scout/error.hpp"
#include "scout/events.hpp"
#include "scout/mathutil.hpp"

using namespace scout;
using testutil::constant_series;
using testutil::make_series;

TEST_CASE("eructation drops: magnitude, threshold and span rules") {
    EventConfig cfg;
    // 50000 -> 20000 over 30 s
    auto s = make_series(0, 10, {49000.0, 50000.0, 40000.0, 30000.0, 20000.0, 21000.0, 22000.0});
    auto events = detect_eructations(s, cfg);
    REQUIRE(events.size() == 1);
    CHECK(events[0].magnitude_ppm == doctest::Approx(30000.0));
    CHECK(events[0].start == doctest::Approx(10.0));
    CHECK(events[0].end == doctest::Approx(40.0));

    // 4000 ppm decrease: below the drop threshold
    auto small = make_series(0, 10, {20000.0, 19000.0, 17000.0, 16000.0, 16500.0});
    CHECK(detect_eructations(small, cfg).empty());
}

TEST_CASE("eructation drops obey the span cap inside long declines") {
    EventConfig cfg;
    // slow 300 s decline losing 200 ppm per 10 s step: no 60 s stretch loses 5000
    std::vector<double> slow;
    for (int k = 0; k < 31; ++k) slow.push_back(30000.0 - 200.0 * k);
    CHECK(detect_eructations(make_series(0, 10, slow), cfg).empty());

    // saturation shelf followed by a sharp fall: the qualifying window starts
    // on the shelf, within the span budget of the fall
    std::vector<double> shelf(12, 50000.0);
    shelf.push_back(22000.0);
    shelf.push_back(23000.0);
    auto events = detect_eructations(make_series(0, 10, shelf), cfg);
    REQUIRE(events.size() == 1);
    CHECK(events[0].magnitude_ppm == doctest::Approx(28000.0));
}

TEST_CASE("events in one list never overlap (property)") {
    EventConfig cfg;
    num::Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 400;
        Series s = Series::uniform(0, 10, n, Unit::ppm);
        double level = 25000.0;
        for (std::size_t i = 0; i < n; ++i) {
            level += rng.uniform(-2000.0, 2400.0);
            if (rng.u01() < 0.03) level -= rng.uniform(6000.0, 20000.0);
            level = std::clamp(level, 500.0, 50000.0);
            s.set(i, level);
        }
        auto events = detect_eructations(s, cfg);
        for (std::size_t e = 1; e < events.size(); ++e)
            CHECK(events[e].start >= events[e - 1].end);
    }
}

TEST_CASE("eructation detection is consistent under integer resampling") {
    EventConfig fine_cfg;
    fine_cfg.drop_max_span_s = 60.0;
    EventConfig coarse_cfg = fine_cfg;

    num::Rng rng(23);
    Series fine = Series::uniform(0, 10, 600, Unit::ppm);
    double level = 30000.0;
    std::vector<double> truth_times;
    for (std::size_t i = 0; i < 600; ++i) {
        level = std::min(50000.0, level + 300.0);
        if (i % 90 == 50) {
            level -= 15000.0;  // sharp drop, one fine sample
            truth_times.push_back(static_cast<double>(i) * 10.0);
        }
        level = std::max(500.0, level);
        fine.set(i, level);
    }
    Series coarse = Series::uniform(0, 20, 300, Unit::ppm);
    for (std::size_t i = 0; i < 300; ++i) coarse.set(i, fine.values[2 * i]);

    auto fe = detect_eructations(fine, fine_cfg);
    auto ce = detect_eructations(coarse, coarse_cfg);
    REQUIRE(fe.size() == truth_times.size());
    REQUIRE(ce.size() == truth_times.size());
    for (std::size_t k = 0; k < fe.size(); ++k)
        CHECK(std::fabs(fe[k].end - ce[k].end) <= 20.0);  // within one coarse sample
}

namespace {

// prominence by the two-sided walk, written independently of the library path
double brute_prominence(const std::vector<double>& v, std::size_t i) {
    double left = v[i];
    for (std::size_t k = i; k-- > 0;) {
        if (v[k] > v[i]) break;
        left = std::min(left, v[k]);
    }
    double right = v[i];
    for (std::size_t k = i + 1; k < v.size(); ++k) {
        if (v[k] > v[i]) break;
        right = std::min(right, v[k]);
    }
    return v[i] - std::max(left, right);
}

}  // namespace

TEST_CASE("peak detection: prominence, separation and the brute-force oracle") {
    EventConfig cfg;
    CHECK(detect_peaks(constant_series(0, 1, 100, 0.0), cfg).empty());

    // isolated triangular peak of height 200: prominence equals height
    Series tri = Series::uniform(0, 1, 200, Unit::ppm);
    for (std::size_t i = 0; i < 200; ++i) tri.set(i, 0.0);
    for (int k = -20; k <= 20; ++k)
        tri.set(static_cast<std::size_t>(100 + k), 200.0 * (1.0 - std::fabs(k) / 21.0));
    auto single = detect_peaks(tri, cfg);
    REQUIRE(single.size() == 1);
    CHECK(single[0].magnitude_ppm == doctest::Approx(200.0).epsilon(1e-9));

    // two peaks 30 s apart: only the higher survives
    Series crowd = Series::uniform(0, 1, 200, Unit::ppm);
    for (std::size_t i = 0; i < 200; ++i) crowd.set(i, 0.0);
    for (int k = -5; k <= 5; ++k) {
        crowd.set(static_cast<std::size_t>(80 + k), 120.0 * (1.0 - std::fabs(k) / 6.0));
        crowd.set(static_cast<std::size_t>(110 + k), 180.0 * (1.0 - std::fabs(k) / 6.0));
    }
    auto kept = detect_peaks(crowd, cfg);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].start == doctest::Approx(110.0));

    // prominence equals the brute-force definition on random traces
    num::Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 50 + static_cast<std::size_t>(rng.uniform(0, 150));
        Series s = Series::uniform(0, 1, n, Unit::ppm);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = rng.uniform(0.0, 500.0);
            s.set(i, v[i]);
        }
        EventConfig loose = cfg;
        loose.peak_min_separation_s = 0.0;
        loose.peak_min_prominence_ppm = 1.0;
        for (const auto& e : detect_peaks(s, loose)) {
            auto idx = static_cast<std::size_t>(std::lround(e.start - s.t0));
            CHECK(e.magnitude_ppm == doctest::Approx(brute_prominence(v, idx)).epsilon(1e-12));
        }
    }
}

TEST_CASE("posture response measures step height, latency and censoring") {
    EventConfig cfg;
    const std::size_t n = 800;
    Series s = Series::uniform(0, 10, n, Unit::ppm);
    for (std::size_t i = 0; i < n; ++i) s.set(i, 10000.0);
    // +14500 step at t = 4000 decaying slowly
    for (std::size_t i = 400; i < n; ++i)
        s.set(i, 10000.0 + 14500.0 * std::exp(-(static_cast<double>(i) - 400.0) * 10.0 / 600.0));
    std::vector<BehaviorInterval> behavior{{4000.0, 4600.0, BehaviorLabel::sitting}};
    auto res = posture_response(s, behavior, cfg);
    REQUIRE(res.n == 1);
    CHECK(res.mean_ppm == doctest::Approx(14500.0).epsilon(0.01));
    CHECK(res.mean_latency_s < 60.0);
    CHECK(res.censored == 0);

    auto empty = posture_response(s, {}, cfg);
    CHECK(empty.n == 0);

    // transition during saturation: response capped at ceiling - pre-mean
    Series sat = Series::uniform(0, 10, 400, Unit::ppm);
    for (std::size_t i = 0; i < 400; ++i) sat.set(i, i < 200 ? 40000.0 : 50000.0);
    std::vector<BehaviorInterval> b2{{2000.0, 2600.0, BehaviorLabel::standing}};
    auto capped = posture_response(sat, b2, cfg);
    REQUIRE(capped.n == 1);
    CHECK(capped.censored == 1);
    CHECK(capped.mean_ppm == doctest::Approx(10000.0));

    // window extending past the series start is skipped
    std::vector<BehaviorInterval> early{{100.0, 700.0, BehaviorLabel::sitting}};
    auto skipped = posture_response(s, early, cfg);
    CHECK(skipped.skipped == 1);
}

TEST_CASE("feeding lag recovers a programmed response peak") {
    EventConfig cfg;
    const std::size_t n = 4000;  // ~11 h at 10 s
    Series s = Series::uniform(0, 10, n, Unit::ppm);
    for (std::size_t i = 0; i < n; ++i) s.set(i, 15000.0);
    std::vector<Timestamp> feeds{4000.0, 14000.0, 24000.0};
    for (Timestamp tf : feeds) {
        auto k0 = static_cast<std::size_t>((tf + 1800.0) / 10.0);
        for (std::size_t i = k0; i < k0 + 120 && i < n; ++i)
            s.values[i] += 8000.0 * std::exp(-(static_cast<double>(i) - k0) * 10.0 / 400.0);
    }
    auto lag = feeding_lag(s, feeds, cfg);
    CHECK(std::fabs(lag.lag_s - 1800.0) <= 20.0);
    CHECK(lag.confidence == doctest::Approx(1.0));
    CHECK_FALSE(lag.inconclusive);

    CHECK_THROWS_AS(feeding_lag(s, {4000.0}, cfg), Error);  // needs >= 3 events

    // flat trace: the per-event argmax scatters over the band
    num::Rng rng(41);
    Series flat = Series::uniform(0, 10, n, Unit::ppm);
    for (std::size_t i = 0; i < n; ++i) flat.set(i, 15000.0 + rng.normal(0.0, 80.0));
    auto null_lag = feeding_lag(flat, feeds, cfg);
    CHECK(null_lag.inconclusive);

    EventConfig bad = cfg;
    bad.feeding_lag_lo_s = 500.0;
    bad.feeding_lag_hi_s = 400.0;
    CHECK_THROWS_AS(feeding_lag(s, feeds, bad), Error);
}

TEST_CASE("event CSV round-trips") {
    std::vector<EmissionEvent> events{
        {EventKind::eructation_drop, 1000.0, 1030.0, 12345.5},
        {EventKind::sniffer_peak, 2000.0, 2001.0, 87.25},
    };
    std::ostringstream out;
    write_events_csv(out, events);
    std::istringstream in(out.str());
    auto back = read_events_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].kind == EventKind::eructation_drop);
    CHECK(back[0].magnitude_ppm == doctest::Approx(12345.5));
    CHECK(back[1].kind == EventKind::sniffer_peak);
    CHECK(back[1].start == doctest::Approx(2000.0));
}
