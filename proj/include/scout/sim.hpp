#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scout/baseline.hpp"
#include "scout/events.hpp"
#include "scout/records.hpp"
#include "scout/series.hpp"

namespace scout::sim {

// Deterministic generator of a paired deployment day: every draw comes from
// the seed, so identical configs give byte-identical outputs.
struct SimConfig {
    std::uint64_t seed = 42;
    double duration_h = 24.0;
    double start_epoch_s = 1757635200.0;  // 2025-09-12T00:00:00Z
    double scout_dt_s = 10.0;
    double sniffer_dt_s = 1.0;

    // rumen fill-and-vent dynamics
    double baseline_rumen_ppm = 18000.0;
    double fill_rate_ppm_s = 40.0;
    double quiet_fill_rate_ppm_s = 0.2;  // inside behavior-response windows
    double hood_fill_rate_ppm_s = 26.0;  // while at the hood (drained by frequent vents)
    double ceiling_ppm = 50000.0;
    double floor_ppm = 500.0;
    double erupt_mean_interval_s = 600.0;   // away from the hood
    double erupt_hood_interval_s = 420.0;   // while feeding (actively eructating)
    double erupt_min_interval_s = 120.0;
    double erupt_start_margin_s = 300.0;  // clear of the sensor warm-up window
    double erupt_mag_lo_ppm = 8000.0;
    double erupt_mag_hi_ppm = 20000.0;
    double erupt_span_lo_s = 2.0;
    double erupt_span_hi_s = 15.0;
    double scout_noise_sd_ppm = 80.0;
    double scout_resolution_ppm = 100.0;
    int scout_init_nan_rows = 3;

    // presence schedule and hood coupling
    int presence_bouts_per_day = 10;
    double presence_dur_lo_s = 2700.0;
    double presence_dur_hi_s = 3900.0;
    double dilution_lo = 100.0;  // ruminal-to-ambient concentration ratio
    double dilution_hi = 1000.0;
    double vent_tau_s = 36000.0;     // hood washout while occupied (nearly pure accumulation)
    double vent_away_tau_s = 30.0;   // purge once the head leaves
    double sensor_tau_s = 2.754;    // sampling-line response
    double plume_tau_s = 60.0;      // mouth-to-sampling-point transport (bulk)
    double spike_fraction = 0.35;   // vented share arriving as a direct transient
    double spike_tau_s = 25.0;      // washout of that transient
    double sniffer_noise_sd_ppm = 15.0;
    double mixing_noise_sd = 0.03;   // head-position mixing factor on hood gas
    double mixing_noise_tau_s = 20.0;

    // ambient drift profile
    double ambient_level_ppm = 300.0;
    double ambient_slope_ppm_per_day = 60.0;
    double ambient_sin_amp_ppm = 50.0;

    // CO2 proxy channel
    double co2_ambient_ppm = 450.0;
    double co2_presence_amp_ppm = 1200.0;
    double co2_edge_tau_s = 15.0;
    double co2_release_tau_s = 60.0;  // slower decay keeps the mask over the purge transient
    double co2_noise_sd_ppm = 8.0;

    // flow channel and pump resets
    double flow_nominal_l_min = 1.1;
    double flow_noise_sd = 0.01;
    int pump_resets_per_day = 4;
    double reset_dur_lo_s = 8.0;
    double reset_dur_hi_s = 20.0;

    // scout clock drift (software timing)
    double clock_drift_s_per_day = -30.0;

    // programmed behavior responses
    int posture_events_per_day = 6;
    double posture_step_ppm = 14500.0;
    double posture_decay_tau_s = 600.0;
    int feedings_per_day = 4;
    double feeding_lag_s = 1800.0;
    double feeding_pulse_ppm = 9000.0;
    double feeding_decay_tau_s = 500.0;

    // environment
    double temp_mean_c = 21.0;
    double temp_amp_c = 3.0;
    double pressure_mean_mbar = 1008.0;
    double pressure_amp_mbar = 4.0;
};

struct TruthEvent {
    Timestamp start = 0.0;
    Timestamp end = 0.0;
    double magnitude_ppm = 0.0;
};

struct CoupledPulse {
    Timestamp t = 0.0;
    double peak_ppm = 0.0;        // realized slug maximum in the hood
    std::size_t eructation_index = 0;
};

struct SimTruth {
    std::vector<TruthEvent> eructations;
    std::vector<Interval> presence;
    std::vector<Interval> pump_resets;
    std::vector<Timestamp> feeding_events;
    std::vector<Timestamp> posture_events;
    std::vector<CoupledPulse> pulses;
    std::vector<DriftAnchor> drift_anchors;
    double clock_drift_s_per_day = 0.0;
    double posture_step_ppm = 0.0;
    double feeding_lag_s = 0.0;
    Series true_ambient;  // noise-free ambient CH4, 60 s cadence
};

struct SimResult {
    std::vector<ScoutRecord> scout;      // timestamps carry the programmed drift
    std::vector<SnifferRecord> sniffer;  // true UTC timestamps
    std::vector<BehaviorInterval> behavior;
    SimTruth truth;
};

SimResult simulate(const SimConfig& cfg);

std::string truth_to_json(const SimTruth& truth);
SimTruth truth_from_json(const std::string& text);

// Pipeline products to be scored against the truth ledger; null members are
// skipped and their report fields stay unset.
struct PipelineOutputs {
    const std::vector<EmissionEvent>* eructations = nullptr;
    const IntervalSet* excluded = nullptr;  // padded pump exclusion windows
    const PresenceMask* presence = nullptr;
    Timestamp presence_t0 = 0.0;
    double presence_dt = 1.0;
    const Series* baseline = nullptr;
    const PostureResponse* posture = nullptr;
    const FeedingLag* feeding = nullptr;
};

struct ScoreReport {
    double eructation_recall = -1.0;
    double eructation_precision = -1.0;
    std::size_t eructation_false_positives = 0;
    bool resets_all_recovered = false;
    double presence_recall = -1.0;
    double presence_precision = -1.0;
    double baseline_rmse_ppm = -1.0;
    double baseline_rmse_frac = -1.0;  // relative to the mean ambient level
    double posture_mean_ppm = 0.0;
    double posture_err_frac = -1.0;    // |recovered - programmed| / programmed
    double feeding_lag_s = 0.0;
    double feeding_lag_err_s = -1.0;
};

ScoreReport score_pipeline(const SimTruth& truth, const PipelineOutputs& outputs);

std::string score_to_json(const ScoreReport& report);

}  // namespace scout::sim
