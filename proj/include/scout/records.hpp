#pragma once

#include <optional>
#include <string>

#include "scout/series.hpp"

namespace scout {

// One row of the in-rumen logger CSV. Concentration is reported at 100 ppm
// resolution over 0-50,000 ppm; a missing value means the field was empty or
// unparseable (e.g. the literal "NaN" emitted during sensor start-up).
struct ScoutRecord {
    Timestamp t = 0.0;
    std::optional<double> ch4_ppm;
    std::optional<double> temp_c;
    std::string status;  // raw token, preserved verbatim
};

// One row of the hood sampler CSV (1 Hz, mass concentrations).
struct SnifferRecord {
    Timestamp t = 0.0;
    std::optional<double> ch4_mg_m3;
    std::optional<double> co2_mg_m3;
    std::optional<double> flow_l_min;
    std::optional<double> temp_c;
    std::optional<double> pressure_mbar;
};

enum class BehaviorLabel : std::uint8_t { head_in_hood, sitting, standing, feeding, other };

const char* behavior_label_name(BehaviorLabel l);
// Unknown labels map to `other` (the caller counts those).
BehaviorLabel behavior_label_from_name(const std::string& name, bool* known = nullptr);

struct BehaviorInterval {
    Timestamp start = 0.0;
    Timestamp end = 0.0;
    BehaviorLabel label = BehaviorLabel::other;
};

// Deployment-record pair used for software clock correction.
struct DriftAnchor {
    Timestamp logged_t = 0.0;  // as recorded by the device
    Timestamp true_t = 0.0;    // from the deployment record
};

struct SensorSpec {
    double tau_s = 1.0;  // time to reach 63% of the final signal after a step
    double range_min_ppm = 0.0;
    double range_max_ppm = 50000.0;
    double resolution_ppm = 100.0;
    double sample_hz = 0.1;
};

// Step-response constants: the in-rumen sensor settles in under a second; the
// hood sampler is limited by gas transport through its sampling line.
inline constexpr SensorSpec kScoutSensor{1.0, 0.0, 50000.0, 100.0, 0.1};
inline constexpr SensorSpec kSnifferSensor{2.754, 0.0, 50000.0, 1.0, 1.0};

}  // namespace scout
