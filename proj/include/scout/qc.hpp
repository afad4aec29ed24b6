#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "scout/series.hpp"

namespace scout {

struct QCConfig {
    double warmup_s = 180.0;          // sensor initialization window after power-up
    double saturation_ppm = 50000.0;  // upper detection limit (clipped code)
    double low_ppm = 1000.0;          // blockage/condensate artifact threshold
    double pre_exclusion_s = 2.0;     // padding before each pump event
    double post_exclusion_s = 40.0;   // padding after each pump event
    double min_flow_l_min = 0.75;     // manufacturer-specified operating floor
    double ambient_low_ppm = 1.8;     // global background band, inclusive
    double ambient_high_ppm = 2.1;
    double max_weekly_drift_frac = 0.005;
};

enum class SampleClass : std::uint8_t {
    valid,
    missing,
    warmup,
    saturated,
    low,
    drop_event,
    excluded_artifact,
    excluded_flow,
};
inline constexpr std::size_t kSampleClassCount = 8;

const char* sample_class_name(SampleClass c);
std::optional<SampleClass> sample_class_from_name(std::string_view name);

struct QCReport {
    std::array<std::size_t, kSampleClassCount> counts{};  // indexed by SampleClass
    std::size_t total = 0;
    bool defined = false;  // false when every sample is missing
    // Fractions over all non-missing samples. Retained = valid + saturated +
    // drop_event; saturation and drops are informative, low values are not.
    double retention_frac = 0.0;
    double saturation_frac = 0.0;
    double low_frac = 0.0;
    double drop_frac = 0.0;

    std::size_t count(SampleClass c) const { return counts[static_cast<std::size_t>(c)]; }
};

// Invalidates everything within warmup_s of the first sample.
Series strip_initialization(const Series& s, const QCConfig& cfg);

// Partition of an in-rumen ppm series. Samples inside a drop interval class
// as drop_event even below the low threshold; saturation compares >=.
std::vector<SampleClass> classify_scout(const Series& s, const QCConfig& cfg,
                                        const IntervalSet& drops);

// Maximal spans where flow < min_flow, unpadded.
IntervalSet detect_pump_resets(const Series& flow, const QCConfig& cfg);

struct ExclusionResult {
    Series series;
    std::vector<SampleClass> classes;  // valid / missing / excluded_artifact / excluded_flow
    IntervalSet padded_events;
};

// Invalidates samples inside event windows padded by (pre, post) seconds and
// samples whose concurrent flow is below the operating floor.
ExclusionResult apply_exclusions(const Series& s, const IntervalSet& events, const Series& flow,
                                 const QCConfig& cfg);

struct AmbientCheck {
    bool pass = false;
    double median_ppm = 0.0;
};
AmbientCheck ambient_zero_check(const Series& ambient_ppm, const QCConfig& cfg);

struct DriftCheck {
    bool pass = false;
    double weekly_frac = 0.0;  // |slope| * 604800 / mean baseline
};
DriftCheck weekly_drift_check(const std::vector<std::pair<Timestamp, double>>& baselines,
                              const QCConfig& cfg);

QCReport retention_report(const std::vector<SampleClass>& classes);

}  // namespace scout
