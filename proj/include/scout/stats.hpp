#pragma once

#include <array>
#include <string>
#include <vector>

#include "scout/baseline.hpp"
#include "scout/events.hpp"
#include "scout/series.hpp"

namespace scout {

struct QuantileSummary {
    std::size_t n = 0;
    double q25 = 0.0, q50 = 0.0, q75 = 0.0, q90 = 0.0;
    double pct_saturation = 0.0;  // percent of valid samples at/above the ceiling
};

// Concentration quantiles by linear interpolation at h = (n-1)p + 1.
QuantileSummary quantile_summary(const Series& scout_ppm, double saturation_ppm = 50000.0);

struct HourlyProfile {
    std::array<double, 24> value{};
    std::array<std::uint8_t, 24> has_data{};
};

// Per UTC hour: max over valid samples per day, then mean across days.
HourlyProfile hourly_max_profile(const Series& s);

// Per UTC hour: trapezoidal area (unit-seconds) over valid spans, mean across
// days with data; invalid gaps contribute nothing.
HourlyProfile hourly_auc(const Series& s);

struct SnifferSummary {
    double pct_time_in_hood = 0.0;
    double events_per_day = 0.0;
    double ambient_mean_ppm = 0.0;  // baseline over absence samples
    double ambient_sd_ppm = 0.0;
    double ch4_median_ppm = 0.0;    // normalized signal during presence
    double ch4_iqr_lo_ppm = 0.0;
    double ch4_iqr_hi_ppm = 0.0;
    double peaks_per_day = 0.0;
};

SnifferSummary sniffer_summary(const Series& normalized_ppm, const PresenceMask& presence,
                               const std::vector<EmissionEvent>& peaks, const Series& baseline,
                               double merge_gap_s = 30.0);

struct AnovaRow {
    std::string source;
    double df = 0.0;
    double ss = 0.0;
    double F = 0.0;  // NaN on the residual row
    double p = 0.0;  // NaN on the residual row
};

// One observation of a crossed three-factor design; levels are dense indices.
struct Observation {
    int diet_or_animal = 0;
    int sensor = 0;
    int day = 0;
    double value = 0.0;
};

// Fixed-effects factorial ANOVA with main effects and the three two-way
// interactions; day is a fixed blocking factor. Sums of squares use the
// balanced mean decomposition; an empty cell is an error.
std::vector<AnovaRow> factorial_anova(const std::vector<Observation>& observations);

void write_anova_csv(std::ostream& out, const std::vector<AnovaRow>& rows);

}  // namespace scout
