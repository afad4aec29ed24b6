#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "scout/error.hpp"
#include "scout/mathutil.hpp"
#include "scout/units.hpp"

using namespace scout;

namespace {

// Independent oracle: ppm = c * Vm / M with the molar volume Vm = R T / P in
// litres per mole.
double molar_volume_oracle(double c_mg_m3, double temp_c, double pressure_mbar, double m) {
    double vm_l_per_mol = GasConstants::R * (temp_c + 273.15) / (pressure_mbar * 100.0) * 1000.0;
    return c_mg_m3 * vm_l_per_mol / m;
}

}  // namespace

TEST_CASE("conversion matches the published reference points") {
    CHECK(mg_m3_to_ppm(1.0, 25.0, 1013.25, GasConstants::M_CH4) == doctest::Approx(1.5253).epsilon(1e-4));
    CHECK(mg_m3_to_ppm(0.0, 3.0, 990.0, GasConstants::M_CH4) == 0.0);
    CHECK(mg_m3_to_ppm(16.04, 0.0, 1013.25, GasConstants::M_CH4) ==
          doctest::Approx(22.414).epsilon(1e-4));
    CHECK(mg_m3_to_ppm(44.01, 0.0, 1013.25, GasConstants::M_CO2) ==
          doctest::Approx(22.414).epsilon(1e-4));
}

TEST_CASE("conversion agrees with the molar-volume oracle over the field envelope") {
    num::Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        double c = rng.uniform(0.001, 2000.0);
        double t = rng.uniform(-10.0, 45.0);
        double p = rng.uniform(900.0, 1060.0);
        double got = mg_m3_to_ppm(c, t, p, GasConstants::M_CH4);
        double want = molar_volume_oracle(c, t, p, GasConstants::M_CH4);
        CHECK(std::fabs(got - want) <= 1e-9 * std::fabs(want));
    }
}

TEST_CASE("conversion is linear in concentration and inverts cleanly") {
    num::Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        double c = rng.uniform(0.01, 500.0);
        double k = rng.uniform(0.1, 50.0);
        double t = rng.uniform(-10.0, 45.0);
        double p = rng.uniform(900.0, 1060.0);
        double one = mg_m3_to_ppm(c, t, p, GasConstants::M_CH4);
        double scaled = mg_m3_to_ppm(k * c, t, p, GasConstants::M_CH4);
        CHECK(std::fabs(scaled - k * one) <= 1e-12 * std::fabs(scaled));
        double back = ppm_to_mg_m3(one, t, p, GasConstants::M_CH4);
        CHECK(std::fabs(back - c) <= 1e-9 * c);
    }
}

TEST_CASE("conversion rejects a nonpositive pressure") {
    CHECK_THROWS_AS(mg_m3_to_ppm(1.0, 20.0, 0.0, GasConstants::M_CH4), Error);
    CHECK_THROWS_AS(mg_m3_to_ppm(1.0, 20.0, -5.0, GasConstants::M_CH4), Error);
}

TEST_CASE("convert_series applies each sample's own conditions") {
    auto mass = testutil::constant_series(0.0, 1.0, 5, 1.0, Unit::mg_m3);
    auto temp = testutil::constant_series(0.0, 1.0, 5, 25.0, Unit::celsius);
    auto pressure = testutil::constant_series(0.0, 1.0, 5, 1013.25, Unit::mbar);
    auto out = convert_series(mass, temp, pressure, Gas::CH4);
    CHECK(out.invalidated == 0);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(out.series.values[i] == doctest::Approx(1.5253).epsilon(1e-4));

    pressure.set_invalid(2);
    auto partial = convert_series(mass, temp, pressure, Gas::CH4);
    CHECK(partial.invalidated == 1);
    CHECK_FALSE(partial.series.is_valid(2));
    CHECK(partial.series.is_valid(1));

    auto wrong = testutil::constant_series(0.0, 1.0, 5, 1.0, Unit::ppm);
    CHECK_THROWS_AS(convert_series(wrong, temp, pressure, Gas::CH4), Error);
}
