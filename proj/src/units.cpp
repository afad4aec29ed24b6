#include "scout/units.hpp"

#include <cmath>

#include "scout/error.hpp"

namespace scout {

double mg_m3_to_ppm(double c_mg_m3, double temp_c, double pressure_mbar,
                    double molar_mass_g_mol) {
    if (!(pressure_mbar > 0.0)) fail(Errc::data, "pressure must be positive");
    if (!(temp_c > -273.15)) fail(Errc::data, "temperature below absolute zero");
    return c_mg_m3 * GasConstants::R * (temp_c + 273.15) /
           (molar_mass_g_mol * pressure_mbar * 100.0) * 1000.0;
}

double ppm_to_mg_m3(double ppm, double temp_c, double pressure_mbar, double molar_mass_g_mol) {
    if (!(pressure_mbar > 0.0)) fail(Errc::data, "pressure must be positive");
    if (!(temp_c > -273.15)) fail(Errc::data, "temperature below absolute zero");
    return ppm * molar_mass_g_mol * pressure_mbar * 100.0 /
           (GasConstants::R * (temp_c + 273.15)) / 1000.0;
}

ConvertResult convert_series(const Series& mass_mg_m3, const Series& temp_c,
                             const Series& pressure_mbar, Gas gas) {
    if (mass_mg_m3.unit != Unit::mg_m3) fail(Errc::unit, "conversion input must be mg/m3");
    if (temp_c.unit != Unit::celsius || pressure_mbar.unit != Unit::mbar)
        fail(Errc::unit, "temperature/pressure series carry wrong units");
    const std::size_t n = mass_mg_m3.size();
    if (temp_c.size() != n || pressure_mbar.size() != n || temp_c.t0 != mass_mg_m3.t0 ||
        pressure_mbar.t0 != mass_mg_m3.t0 || temp_c.dt != mass_mg_m3.dt ||
        pressure_mbar.dt != mass_mg_m3.dt)
        fail(Errc::alignment, "conversion inputs must share one grid");

    ConvertResult out;
    out.series = Series::uniform(mass_mg_m3.t0, mass_mg_m3.dt, n, Unit::ppm);
    const double m = molar_mass(gas);
    for (std::size_t i = 0; i < n; ++i) {
        if (!mass_mg_m3.is_valid(i)) continue;
        if (!temp_c.is_valid(i) || !pressure_mbar.is_valid(i)) {
            ++out.invalidated;
            continue;
        }
        out.series.set(i, mg_m3_to_ppm(mass_mg_m3.values[i], temp_c.values[i],
                                       pressure_mbar.values[i], m));
    }
    return out;
}

}  // namespace scout
