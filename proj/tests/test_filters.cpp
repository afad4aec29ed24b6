#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "scout/error.hpp"
#include "scout/filters.hpp"
#include "scout/mathutil.hpp"

using namespace scout;
using testutil::constant_series;
using testutil::make_series;

TEST_CASE("moving average: constants, impulses and affine signals") {
    auto flat = constant_series(0, 1, 60, 7.5);
    auto out = moving_average(flat, 21);
    for (std::size_t i = 10; i < 50; ++i) CHECK(out.values[i] == doctest::Approx(7.5));
    CHECK_FALSE(out.is_valid(9));  // incomplete window
    CHECK(out.is_valid(10));

    Series impulse = Series::uniform(0, 1, 61, Unit::ppm);
    for (std::size_t i = 0; i < 61; ++i) impulse.set(i, i == 30 ? 1.0 : 0.0);
    auto conv = moving_average(impulse, 21);
    for (std::size_t i = 20; i <= 40; ++i) CHECK(conv.values[i] == doctest::Approx(1.0 / 21.0));
    CHECK(conv.values[19] == doctest::Approx(0.0));

    Series ramp = Series::uniform(0, 1, 60, Unit::ppm);
    for (std::size_t i = 0; i < 60; ++i) ramp.set(i, 3.0 * i + 2.0);
    auto smoothed = moving_average(ramp, 21);
    for (std::size_t i = 10; i < 50; ++i)
        CHECK(smoothed.values[i] == doctest::Approx(3.0 * i + 2.0).epsilon(1e-12));

    CHECK_THROWS_AS(moving_average(flat, 20), Error);  // even window
}

TEST_CASE("moving average invalidates windows touching invalid samples") {
    auto s = constant_series(0, 1, 60, 5.0);
    s.set_invalid(30);
    auto out = moving_average(s, 21);
    for (std::size_t i = 20; i <= 40; ++i) CHECK_FALSE(out.is_valid(i));
    CHECK(out.is_valid(19));
    CHECK(out.is_valid(41));
}

TEST_CASE("exponential smoothing follows the recursion") {
    auto flat = constant_series(0, 1, 20, 3.3);
    auto out = exp_smooth(flat, 0.3);
    for (std::size_t i = 0; i < 20; ++i) CHECK(out.values[i] == doctest::Approx(3.3));

    // unit step after a zero start: y_n = 1 - (1-alpha)^n
    Series step = Series::uniform(0, 1, 10, Unit::ppm);
    step.set(0, 0.0);
    for (std::size_t i = 1; i < 10; ++i) step.set(i, 1.0);
    auto resp = exp_smooth(step, 0.3);
    CHECK(resp.values[3] == doctest::Approx(1.0 - 0.7 * 0.7 * 0.7).epsilon(1e-12));
    for (std::size_t n = 1; n < 10; ++n)
        CHECK(resp.values[n] ==
              doctest::Approx(1.0 - std::pow(0.7, static_cast<double>(n))).epsilon(1e-12));

    auto identity = exp_smooth(step, 1.0);
    for (std::size_t i = 0; i < 10; ++i) CHECK(identity.values[i] == step.values[i]);
}

TEST_CASE("exponential smoothing holds state across invalid samples") {
    auto s = make_series(0, 1, {1.0, 1.0, 1.0, 1.0, 5.0});
    s.set_invalid(3);
    auto out = exp_smooth(s, 0.5);
    CHECK_FALSE(out.is_valid(3));
    CHECK(out.values[4] == doctest::Approx(0.5 * 5.0 + 0.5 * 1.0));  // state survived
}

TEST_CASE("Savitzky-Golay reproduces polynomials up to its order") {
    Series cubic = Series::uniform(0, 1, 80, Unit::ppm);
    for (std::size_t i = 0; i < 80; ++i) {
        double x = static_cast<double>(i) - 40.0;
        cubic.set(i, 2.0 + 0.5 * x - 0.03 * x * x + 0.004 * x * x * x);
    }
    auto out = savitzky_golay(cubic, 21, 3);
    for (std::size_t i = 10; i < 70; ++i)
        CHECK(std::fabs(out.values[i] - cubic.values[i]) <= 1e-9);

    auto flat = constant_series(0, 1, 40, 9.0);
    auto fout = savitzky_golay(flat, 21, 3);
    for (std::size_t i = 10; i < 30; ++i) CHECK(fout.values[i] == doctest::Approx(9.0));
}

TEST_CASE("Savitzky-Golay coefficients: symmetry, unity sum, noise gain") {
    auto c = savitzky_golay_coeffs(21, 3);
    REQUIRE(c.size() == 21);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < 21; ++i) {
        sum += c[i];
        sum_sq += c[i] * c[i];
        CHECK(c[i] == doctest::Approx(c[20 - i]).epsilon(1e-12));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // quadratic/cubic 21-point smoothing kernel: sum of squares = 987/9177
    CHECK(sum_sq == doctest::Approx(987.0 / 9177.0).epsilon(1e-10));

    // white-noise variance ratio matches the coefficient energy empirically
    num::Rng rng(99);
    const std::size_t n = 1000000;
    Series noise = Series::uniform(0, 1, n, Unit::ppm);
    for (std::size_t i = 0; i < n; ++i) noise.set(i, rng.normal());
    auto filtered = savitzky_golay(noise, 21, 3);
    double var_in = 0.0, var_out = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 10; i + 10 < n; ++i) {
        var_in += noise.values[i] * noise.values[i];
        var_out += filtered.values[i] * filtered.values[i];
        ++m;
    }
    double ratio = var_out / var_in;
    CHECK(std::fabs(ratio - sum_sq) <= 0.02 * sum_sq);
}

TEST_CASE("Savitzky-Golay with order w-1 degenerates to the identity") {
    auto c = savitzky_golay_coeffs(5, 4);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(c[i] == doctest::Approx(i == 2 ? 1.0 : 0.0).epsilon(1e-9));
}

TEST_CASE("constant-velocity Kalman filter converges and tracks ramps") {
    FilterConfig cfg;
    auto flat = constant_series(0, 1, 100, 123.0);
    auto out = kalman_cv(flat, cfg);
    CHECK(std::fabs(out.values[49] - 123.0) <= 1e-6);  // within 50 steps

    Series ramp = Series::uniform(0, 1, 2000, Unit::ppm);
    const double slope = 2.5;
    for (std::size_t i = 0; i < 2000; ++i) ramp.set(i, 10.0 + slope * static_cast<double>(i));
    auto tracked = kalman_cv(ramp, cfg);
    // steady-state level steps reveal the slope estimate
    double est = tracked.values[1999] - tracked.values[1998];
    CHECK(std::fabs(est - slope) <= 1e-3);

    Series outlier = constant_series(0, 1, 200, 50.0);
    outlier.set(100, 5000.0);
    auto damped = kalman_cv(outlier, cfg);
    CHECK(std::fabs(damped.values[100] - 50.0) < 4950.0);  // gain below unity
}

TEST_CASE("MA and SG are linear operators (property)") {
    num::Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 120;
        Series x = Series::uniform(0, 1, n, Unit::ppm);
        Series y = Series::uniform(0, 1, n, Unit::ppm);
        Series mix = Series::uniform(0, 1, n, Unit::ppm);
        double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
        for (std::size_t i = 0; i < n; ++i) {
            double xv = rng.normal(), yv = rng.normal();
            x.set(i, xv);
            y.set(i, yv);
            mix.set(i, a * xv + b * yv);
        }
        auto fx = savitzky_golay(x, 21, 3);
        auto fy = savitzky_golay(y, 21, 3);
        auto fmix = savitzky_golay(mix, 21, 3);
        auto mx = moving_average(x, 21);
        auto my = moving_average(y, 21);
        auto mmix = moving_average(mix, 21);
        for (std::size_t i = 10; i + 10 < n; ++i) {
            CHECK(std::fabs(fmix.values[i] - (a * fx.values[i] + b * fy.values[i])) <= 1e-9);
            CHECK(std::fabs(mmix.values[i] - (a * mx.values[i] + b * my.values[i])) <= 1e-9);
        }
    }
}

TEST_CASE("all filters are shift-equivariant on fully valid series (property)") {
    num::Rng rng(6);
    const std::size_t n = 200, shift = 17;
    Series x = Series::uniform(0, 1, n, Unit::ppm);
    for (std::size_t i = 0; i < n; ++i) x.set(i, rng.normal(10.0, 3.0));
    Series shifted = Series::uniform(0, 1, n, Unit::ppm);
    for (std::size_t i = shift; i < n; ++i) shifted.set(i, x.values[i - shift]);
    for (std::size_t i = 0; i < shift; ++i) shifted.set(i, x.values[0]);

    FilterConfig cfg;
    auto check_pair = [&](const Series& f, const Series& fs) {
        for (std::size_t i = 60; i + 20 < n; ++i) {
            if (!f.is_valid(i - shift) || !fs.is_valid(i)) continue;
            CHECK(fs.values[i] == doctest::Approx(f.values[i - shift]).epsilon(1e-9));
        }
    };
    check_pair(moving_average(x, 21), moving_average(shifted, 21));
    check_pair(savitzky_golay(x, 21, 3), savitzky_golay(shifted, 21, 3));
    check_pair(exp_smooth(x, 0.3), exp_smooth(shifted, 0.3));
    check_pair(kalman_cv(x, cfg), kalman_cv(shifted, cfg));
}

namespace {

// raw trace with sharp symmetric peaks over a flat noisy floor
Series spiky_trace(num::Rng& rng, IntervalSet* peaks) {
    const std::size_t n = 4000;
    Series s = Series::uniform(0, 1, n, Unit::ppm);
    for (std::size_t i = 0; i < n; ++i) s.set(i, 20.0 + rng.normal(0.0, 2.0));
    for (int p = 0; p < 8; ++p) {
        std::size_t center = 200 + static_cast<std::size_t>(p) * 450;
        double height = 150.0 + 20.0 * p;
        for (int k = -6; k <= 6; ++k) {
            auto idx = center + static_cast<std::size_t>(k + 6) - 6;
            double tri = height * (1.0 - std::fabs(k) / 7.0);
            s.values[idx] += tri;
        }
        peaks->add({static_cast<double>(center) - 8.0, static_cast<double>(center) + 8.0});
    }
    return s;
}

}  // namespace

TEST_CASE("filter_compare: SG retains peaks best; centered MA has zero lag") {
    num::Rng rng(77);
    IntervalSet peaks;
    auto raw = spiky_trace(rng, &peaks);
    FilterConfig cfg;
    auto metrics = filter_compare(raw, peaks, cfg);
    REQUIRE(metrics.size() == 4);
    double sg_retention = 0.0, ma_retention = 0.0, ma_lag = 1.0;
    for (const auto& m : metrics) {
        if (m.name == "SG") sg_retention = m.peak_amplitude_retention;
        if (m.name == "MA") {
            ma_retention = m.peak_amplitude_retention;
            ma_lag = m.lag_samples;
        }
    }
    CHECK(sg_retention > ma_retention);  // the selection argument
    CHECK(ma_retention < 1.0);
    CHECK(ma_lag == doctest::Approx(0.0));  // symmetric peaks, centered window

    CHECK_THROWS_AS(filter_compare(raw, IntervalSet{}, cfg), Error);
}
