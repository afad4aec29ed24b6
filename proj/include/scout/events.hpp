#pragma once

#include <iosfwd>
#include <vector>

#include "scout/records.hpp"
#include "scout/series.hpp"

namespace scout {

struct EventConfig {
    double drop_min_ppm = 5000.0;      // total decrease for an eructation drop
    double drop_max_span_s = 60.0;     // the decrease must fit in this span
    double peak_min_prominence_ppm = 50.0;
    double peak_min_separation_s = 60.0;
    double posture_window_s = 900.0;   // pre/post window around a transition
    double feeding_lag_lo_s = 900.0;   // search band for the feeding response
    double feeding_lag_hi_s = 2700.0;
    double saturation_ppm = 50000.0;   // ceiling, for censoring flags
};

enum class EventKind : std::uint8_t { eructation_drop, sniffer_peak };

const char* event_kind_name(EventKind k);

struct EmissionEvent {
    EventKind kind = EventKind::eructation_drop;
    Timestamp start = 0.0;
    Timestamp end = 0.0;
    double magnitude_ppm = 0.0;  // total decrease (drops) or prominence (peaks)
};

// Monotone (non-increasing) runs that lose at least drop_min_ppm within
// drop_max_span_s; overlapping qualifying windows merge into one event.
std::vector<EmissionEvent> detect_eructations(const Series& scout_ppm, const EventConfig& cfg);

// Local maxima by topographic prominence with a minimum pairwise separation;
// the lower of two crowded peaks is discarded.
std::vector<EmissionEvent> detect_peaks(const Series& normalized_ppm, const EventConfig& cfg);

struct PostureResponse {
    std::size_t n = 0;  // transitions measured
    double mean_ppm = 0.0;
    double sd_ppm = 0.0;
    double mean_latency_s = 0.0;
    double sd_latency_s = 0.0;
    std::size_t censored = 0;  // responses that hit the sensor ceiling
    std::size_t skipped = 0;   // transitions whose window left the series
};

// Response to sitting/standing transitions: max over [t, t+W] minus the mean
// over [t-W, t], with the latency of that max.
PostureResponse posture_response(const Series& scout_ppm,
                                 const std::vector<BehaviorInterval>& behavior,
                                 const EventConfig& cfg);

struct FeedingLag {
    double lag_s = 0.0;        // argmax of the pooled event-triggered profile
    double confidence = 0.0;   // events whose own argmax lies within +/-300 s
    bool inconclusive = false;
    std::size_t n_events = 0;
};

FeedingLag feeding_lag(const Series& scout_ppm, const std::vector<Timestamp>& feeding_starts,
                       const EventConfig& cfg);

void write_events_csv(std::ostream& out, const std::vector<EmissionEvent>& events);
std::vector<EmissionEvent> read_events_csv(std::istream& in);

}  // namespace scout
