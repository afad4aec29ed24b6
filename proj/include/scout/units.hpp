#pragma once

#include "scout/series.hpp"

namespace scout {

struct GasConstants {
    static constexpr double R = 8.314462;   // universal gas constant, J/(mol K)
    static constexpr double M_CH4 = 16.04;  // g/mol
    static constexpr double M_CO2 = 44.01;  // g/mol
};

enum class Gas : std::uint8_t { CH4, CO2 };

inline double molar_mass(Gas g) { return g == Gas::CH4 ? GasConstants::M_CH4 : GasConstants::M_CO2; }

// Mass to volumetric concentration under the measured temperature and
// pressure (ideal gas): ppm = c * R * (T_C + 273.15) / (M * P_mbar * 100) * 1000.
double mg_m3_to_ppm(double c_mg_m3, double temp_c, double pressure_mbar, double molar_mass_g_mol);

// Inverse of mg_m3_to_ppm at the same conditions.
double ppm_to_mg_m3(double ppm, double temp_c, double pressure_mbar, double molar_mass_g_mol);

struct ConvertResult {
    Series series;                // ppm, same grid as the mass input
    std::size_t invalidated = 0;  // samples dropped for missing T or P
};

// Per-sample conversion using that sample's own temperature and pressure.
// The three inputs must share one grid; invalid mass samples stay invalid,
// and a sample missing T or P is invalidated and counted.
ConvertResult convert_series(const Series& mass_mg_m3, const Series& temp_c,
                             const Series& pressure_mbar, Gas gas);

}  // namespace scout
