#pragma once

#include <cstdint>
#include <vector>

#include "scout/series.hpp"

namespace scout {

struct BaselineConfig {
    double stage1_abs_ppm = 350.0;   // above the daily median
    double stage1_diff_ppm = 175.0;  // |first difference|
    double stage2_abs_ppm = 250.0;   // above the smoothed baseline
    double stage2_diff_ppm = 125.0;
    int co2_smooth_window = 2000;    // points, centered
    int ch4_smooth_window = 1000;
    double presence_merge_gap_s = 30.0;  // runs closer than this count as one event
    double min_absence_frac = 0.05;      // below this a day's baseline is low-confidence
};

// Per-sample animal-influence flags, same length as the series they describe.
struct PresenceMask {
    std::vector<std::uint8_t> flags;

    std::size_t size() const { return flags.size(); }
    bool is_flagged(std::size_t i) const { return flags[i] != 0; }
    std::size_t flagged_count() const;
};

struct PresenceResult {
    PresenceMask mask;
    std::size_t empty_days = 0;      // UTC days with zero valid samples
    bool window_fallback = false;    // stage 2 fell back to a global median
};

// Stage 1: flags samples whose value exceeds the calendar-day (UTC) median by
// stage1_abs_ppm or whose first difference exceeds stage1_diff_ppm.
PresenceResult detect_presence_stage1(const Series& co2_ppm, const BaselineConfig& cfg);

// Stage 2: re-screens against a long moving average computed over unflagged
// samples (flagged spans bridged linearly); the result contains stage 1.
PresenceResult refine_presence_stage2(const Series& co2_ppm, const PresenceMask& stage1,
                                      const BaselineConfig& cfg);

struct BaselineResult {
    Series baseline;                        // defined at every sample
    std::vector<long> low_confidence_days;  // UTC day numbers with scarce absence data
};

// Time-varying ambient level: long centered mean over absence samples only,
// bridged linearly across presence windows.
BaselineResult ambient_baseline(const Series& ch4_ppm, const PresenceMask& presence,
                                const BaselineConfig& cfg);

// ch4 - baseline, floored at 0; invalid propagates; grids must match.
Series normalize(const Series& ch4_ppm, const Series& baseline);

// Maximal flagged runs as half-open intervals; gaps shorter than merge_gap_s
// are absorbed. Pass merge_gap_s = 0 for the raw runs.
IntervalSet presence_intervals(const PresenceMask& mask, Timestamp t0, double dt,
                               double merge_gap_s);

struct PresenceStats {
    double pct_time = 0.0;
    double events_per_day = 0.0;
    double mean_event_duration_s = 0.0;
    std::size_t events = 0;
};

PresenceStats presence_stats(const PresenceMask& mask, Timestamp t0, double dt,
                             double merge_gap_s = 30.0);

}  // namespace scout
