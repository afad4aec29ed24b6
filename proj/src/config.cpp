#include "scout/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "scout/csv.hpp"
#include "scout/error.hpp"

namespace scout {

namespace {

struct Entry {
    enum class Kind { d, i, u64, str } kind;
    void* ptr;
};

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        fail(Errc::config, "config key '" + key + "': not a number: '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    double x = to_double(key, v);
    if (x != std::floor(x)) fail(Errc::config, "config key '" + key + "': expected an integer");
    return static_cast<int>(x);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::pair<const char*, Entry> table[] = {
        {"scout_csv", {Entry::Kind::str, &scout_csv}},
        {"sniffer_csv", {Entry::Kind::str, &sniffer_csv}},
        {"behavior_csv", {Entry::Kind::str, &behavior_csv}},
        {"out_dir", {Entry::Kind::str, &out_dir}},

        {"qc.warmup_s", {Entry::Kind::d, &qc.warmup_s}},
        {"qc.saturation_ppm", {Entry::Kind::d, &qc.saturation_ppm}},
        {"qc.low_ppm", {Entry::Kind::d, &qc.low_ppm}},
        {"qc.pre_exclusion_s", {Entry::Kind::d, &qc.pre_exclusion_s}},
        {"qc.post_exclusion_s", {Entry::Kind::d, &qc.post_exclusion_s}},
        {"qc.min_flow_l_min", {Entry::Kind::d, &qc.min_flow_l_min}},
        {"qc.ambient_low_ppm", {Entry::Kind::d, &qc.ambient_low_ppm}},
        {"qc.ambient_high_ppm", {Entry::Kind::d, &qc.ambient_high_ppm}},
        {"qc.max_weekly_drift_frac", {Entry::Kind::d, &qc.max_weekly_drift_frac}},

        {"filter.ma_window", {Entry::Kind::i, &filter.ma_window}},
        {"filter.es_alpha", {Entry::Kind::d, &filter.es_alpha}},
        {"filter.sg_window", {Entry::Kind::i, &filter.sg_window}},
        {"filter.sg_order", {Entry::Kind::i, &filter.sg_order}},
        {"filter.kf_process_var", {Entry::Kind::d, &filter.kf_process_var}},
        {"filter.kf_measurement_var", {Entry::Kind::d, &filter.kf_measurement_var}},

        {"baseline.stage1_abs_ppm", {Entry::Kind::d, &baseline.stage1_abs_ppm}},
        {"baseline.stage1_diff_ppm", {Entry::Kind::d, &baseline.stage1_diff_ppm}},
        {"baseline.stage2_abs_ppm", {Entry::Kind::d, &baseline.stage2_abs_ppm}},
        {"baseline.stage2_diff_ppm", {Entry::Kind::d, &baseline.stage2_diff_ppm}},
        {"baseline.co2_smooth_window", {Entry::Kind::i, &baseline.co2_smooth_window}},
        {"baseline.ch4_smooth_window", {Entry::Kind::i, &baseline.ch4_smooth_window}},
        {"baseline.presence_merge_gap_s", {Entry::Kind::d, &baseline.presence_merge_gap_s}},
        {"baseline.min_absence_frac", {Entry::Kind::d, &baseline.min_absence_frac}},

        {"events.drop_min_ppm", {Entry::Kind::d, &events.drop_min_ppm}},
        {"events.drop_max_span_s", {Entry::Kind::d, &events.drop_max_span_s}},
        {"events.peak_min_prominence_ppm", {Entry::Kind::d, &events.peak_min_prominence_ppm}},
        {"events.peak_min_separation_s", {Entry::Kind::d, &events.peak_min_separation_s}},
        {"events.posture_window_s", {Entry::Kind::d, &events.posture_window_s}},
        {"events.feeding_lag_lo_s", {Entry::Kind::d, &events.feeding_lag_lo_s}},
        {"events.feeding_lag_hi_s", {Entry::Kind::d, &events.feeding_lag_hi_s}},

        {"xval.step_s", {Entry::Kind::d, &xval.step_s}},
        {"xval.min_valid_frac", {Entry::Kind::d, &xval.min_valid_frac}},
        {"xval.q_threshold", {Entry::Kind::d, &xval.q_threshold}},
        {"xval.min_valid_per_bin", {Entry::Kind::i, &xval.min_valid_per_bin}},
        {"xval.jobs", {Entry::Kind::i, &xval.jobs}},

        {"sim.seed", {Entry::Kind::u64, &sim.seed}},
        {"sim.duration_h", {Entry::Kind::d, &sim.duration_h}},
        {"sim.start_epoch_s", {Entry::Kind::d, &sim.start_epoch_s}},
        {"sim.scout_dt_s", {Entry::Kind::d, &sim.scout_dt_s}},
        {"sim.sniffer_dt_s", {Entry::Kind::d, &sim.sniffer_dt_s}},
        {"sim.baseline_rumen_ppm", {Entry::Kind::d, &sim.baseline_rumen_ppm}},
        {"sim.fill_rate_ppm_s", {Entry::Kind::d, &sim.fill_rate_ppm_s}},
        {"sim.hood_fill_rate_ppm_s", {Entry::Kind::d, &sim.hood_fill_rate_ppm_s}},
        {"sim.quiet_fill_rate_ppm_s", {Entry::Kind::d, &sim.quiet_fill_rate_ppm_s}},
        {"sim.ceiling_ppm", {Entry::Kind::d, &sim.ceiling_ppm}},
        {"sim.floor_ppm", {Entry::Kind::d, &sim.floor_ppm}},
        {"sim.erupt_mean_interval_s", {Entry::Kind::d, &sim.erupt_mean_interval_s}},
        {"sim.erupt_hood_interval_s", {Entry::Kind::d, &sim.erupt_hood_interval_s}},
        {"sim.erupt_min_interval_s", {Entry::Kind::d, &sim.erupt_min_interval_s}},
        {"sim.erupt_start_margin_s", {Entry::Kind::d, &sim.erupt_start_margin_s}},
        {"sim.erupt_mag_lo_ppm", {Entry::Kind::d, &sim.erupt_mag_lo_ppm}},
        {"sim.erupt_mag_hi_ppm", {Entry::Kind::d, &sim.erupt_mag_hi_ppm}},
        {"sim.erupt_span_lo_s", {Entry::Kind::d, &sim.erupt_span_lo_s}},
        {"sim.erupt_span_hi_s", {Entry::Kind::d, &sim.erupt_span_hi_s}},
        {"sim.scout_noise_sd_ppm", {Entry::Kind::d, &sim.scout_noise_sd_ppm}},
        {"sim.scout_resolution_ppm", {Entry::Kind::d, &sim.scout_resolution_ppm}},
        {"sim.scout_init_nan_rows", {Entry::Kind::i, &sim.scout_init_nan_rows}},
        {"sim.presence_bouts_per_day", {Entry::Kind::i, &sim.presence_bouts_per_day}},
        {"sim.presence_dur_lo_s", {Entry::Kind::d, &sim.presence_dur_lo_s}},
        {"sim.presence_dur_hi_s", {Entry::Kind::d, &sim.presence_dur_hi_s}},
        {"sim.dilution_lo", {Entry::Kind::d, &sim.dilution_lo}},
        {"sim.dilution_hi", {Entry::Kind::d, &sim.dilution_hi}},
        {"sim.vent_tau_s", {Entry::Kind::d, &sim.vent_tau_s}},
        {"sim.vent_away_tau_s", {Entry::Kind::d, &sim.vent_away_tau_s}},
        {"sim.sensor_tau_s", {Entry::Kind::d, &sim.sensor_tau_s}},
        {"sim.plume_tau_s", {Entry::Kind::d, &sim.plume_tau_s}},
        {"sim.spike_fraction", {Entry::Kind::d, &sim.spike_fraction}},
        {"sim.spike_tau_s", {Entry::Kind::d, &sim.spike_tau_s}},
        {"sim.sniffer_noise_sd_ppm", {Entry::Kind::d, &sim.sniffer_noise_sd_ppm}},
        {"sim.mixing_noise_sd", {Entry::Kind::d, &sim.mixing_noise_sd}},
        {"sim.mixing_noise_tau_s", {Entry::Kind::d, &sim.mixing_noise_tau_s}},
        {"sim.ambient_level_ppm", {Entry::Kind::d, &sim.ambient_level_ppm}},
        {"sim.ambient_slope_ppm_per_day", {Entry::Kind::d, &sim.ambient_slope_ppm_per_day}},
        {"sim.ambient_sin_amp_ppm", {Entry::Kind::d, &sim.ambient_sin_amp_ppm}},
        {"sim.co2_ambient_ppm", {Entry::Kind::d, &sim.co2_ambient_ppm}},
        {"sim.co2_presence_amp_ppm", {Entry::Kind::d, &sim.co2_presence_amp_ppm}},
        {"sim.co2_edge_tau_s", {Entry::Kind::d, &sim.co2_edge_tau_s}},
        {"sim.co2_release_tau_s", {Entry::Kind::d, &sim.co2_release_tau_s}},
        {"sim.co2_noise_sd_ppm", {Entry::Kind::d, &sim.co2_noise_sd_ppm}},
        {"sim.flow_nominal_l_min", {Entry::Kind::d, &sim.flow_nominal_l_min}},
        {"sim.flow_noise_sd", {Entry::Kind::d, &sim.flow_noise_sd}},
        {"sim.pump_resets_per_day", {Entry::Kind::i, &sim.pump_resets_per_day}},
        {"sim.reset_dur_lo_s", {Entry::Kind::d, &sim.reset_dur_lo_s}},
        {"sim.reset_dur_hi_s", {Entry::Kind::d, &sim.reset_dur_hi_s}},
        {"sim.clock_drift_s_per_day", {Entry::Kind::d, &sim.clock_drift_s_per_day}},
        {"sim.posture_events_per_day", {Entry::Kind::i, &sim.posture_events_per_day}},
        {"sim.posture_step_ppm", {Entry::Kind::d, &sim.posture_step_ppm}},
        {"sim.posture_decay_tau_s", {Entry::Kind::d, &sim.posture_decay_tau_s}},
        {"sim.feedings_per_day", {Entry::Kind::i, &sim.feedings_per_day}},
        {"sim.feeding_lag_s", {Entry::Kind::d, &sim.feeding_lag_s}},
        {"sim.feeding_pulse_ppm", {Entry::Kind::d, &sim.feeding_pulse_ppm}},
        {"sim.feeding_decay_tau_s", {Entry::Kind::d, &sim.feeding_decay_tau_s}},
        {"sim.temp_mean_c", {Entry::Kind::d, &sim.temp_mean_c}},
        {"sim.temp_amp_c", {Entry::Kind::d, &sim.temp_amp_c}},
        {"sim.pressure_mean_mbar", {Entry::Kind::d, &sim.pressure_mean_mbar}},
        {"sim.pressure_amp_mbar", {Entry::Kind::d, &sim.pressure_amp_mbar}},
    };

    if (key == "session_date") {
        session_date = parse_date(value);
        return;
    }
    if (key == "drift_anchors") {
        drift_anchors.clear();
        std::istringstream list(value);
        std::string pair;
        while (std::getline(list, pair, ',')) {
            auto colon = pair.find(':');
            if (colon == std::string::npos)
                fail(Errc::config, "config key 'drift_anchors': expected logged:true pairs");
            DriftAnchor a;
            a.logged_t = to_double(key, trim(pair.substr(0, colon)));
            a.true_t = to_double(key, trim(pair.substr(colon + 1)));
            drift_anchors.push_back(a);
        }
        return;
    }
    if (key == "xval.scales_min") {
        xval.scales_min.clear();
        std::istringstream list(value);
        std::string item;
        while (std::getline(list, item, ',')) xval.scales_min.push_back(to_int(key, trim(item)));
        if (xval.scales_min.empty()) fail(Errc::config, "xval.scales_min: empty list");
        return;
    }

    for (const auto& [name, entry] : table) {
        if (key != name) continue;
        switch (entry.kind) {
            case Entry::Kind::d: *static_cast<double*>(entry.ptr) = to_double(key, value); return;
            case Entry::Kind::i: *static_cast<int*>(entry.ptr) = to_int(key, value); return;
            case Entry::Kind::u64:
                *static_cast<std::uint64_t*>(entry.ptr) =
                    static_cast<std::uint64_t>(to_double(key, value));
                return;
            case Entry::Kind::str: *static_cast<std::string*>(entry.ptr) = value; return;
        }
    }
    fail(Errc::config, "unknown config key '" + key + "'");
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::config, "cannot open config file: " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            fail(Errc::config,
                 "config line " + std::to_string(line_no) + ": expected key = value");
        set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    validate();
}

void RunConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) fail(Errc::config, std::string(name) + " must be positive");
    };
    positive(qc.saturation_ppm, "qc.saturation_ppm");
    positive(qc.low_ppm, "qc.low_ppm");
    if (!(qc.low_ppm < qc.saturation_ppm))
        fail(Errc::config, "qc.low_ppm must be below qc.saturation_ppm");
    if (qc.warmup_s < 0.0) fail(Errc::config, "qc.warmup_s must be >= 0");
    positive(qc.min_flow_l_min, "qc.min_flow_l_min");
    if (!(qc.ambient_low_ppm <= qc.ambient_high_ppm))
        fail(Errc::config, "qc ambient band must be ordered");

    if (filter.ma_window % 2 == 0 || filter.sg_window % 2 == 0)
        fail(Errc::config, "filter windows must be odd");
    if (filter.sg_window < filter.sg_order + 2)
        fail(Errc::config, "filter.sg_window must be >= order + 2");
    if (!(filter.es_alpha > 0.0 && filter.es_alpha <= 1.0))
        fail(Errc::config, "filter.es_alpha must be in (0, 1]");
    positive(filter.kf_process_var, "filter.kf_process_var");
    positive(filter.kf_measurement_var, "filter.kf_measurement_var");

    if (!(baseline.stage2_abs_ppm < baseline.stage1_abs_ppm) ||
        !(baseline.stage2_diff_ppm < baseline.stage1_diff_ppm))
        fail(Errc::config, "stage-2 thresholds must sit below stage-1 thresholds");
    if (baseline.co2_smooth_window < 3 || baseline.ch4_smooth_window < 3)
        fail(Errc::config, "baseline smoothing windows must be >= 3");

    positive(events.drop_min_ppm, "events.drop_min_ppm");
    positive(events.drop_max_span_s, "events.drop_max_span_s");
    if (!(events.feeding_lag_lo_s < events.feeding_lag_hi_s))
        fail(Errc::config, "events feeding lag band must be ordered");

    if (xval.scales_min.empty()) fail(Errc::config, "xval.scales_min: empty list");
    for (int s : xval.scales_min)
        if (s <= 0) fail(Errc::config, "xval scales must be positive");
    positive(xval.step_s, "xval.step_s");
    if (!(xval.min_valid_frac > 0.0 && xval.min_valid_frac <= 1.0))
        fail(Errc::config, "xval.min_valid_frac must be in (0, 1]");
}

nlohmann::ordered_json RunConfig::echo() const {
    nlohmann::ordered_json j;
    j["scout_csv"] = scout_csv;
    j["sniffer_csv"] = sniffer_csv;
    j["behavior_csv"] = behavior_csv;
    j["out_dir"] = out_dir;
    if (session_date) j["session_date"] = *session_date;
    auto anchors = nlohmann::ordered_json::array();
    for (const auto& a : drift_anchors)
        anchors.push_back({{"logged_t", a.logged_t}, {"true_t", a.true_t}});
    j["drift_anchors"] = anchors;

    j["qc"] = {{"warmup_s", qc.warmup_s},
               {"saturation_ppm", qc.saturation_ppm},
               {"low_ppm", qc.low_ppm},
               {"pre_exclusion_s", qc.pre_exclusion_s},
               {"post_exclusion_s", qc.post_exclusion_s},
               {"min_flow_l_min", qc.min_flow_l_min},
               {"ambient_band_ppm", {qc.ambient_low_ppm, qc.ambient_high_ppm}},
               {"max_weekly_drift_frac", qc.max_weekly_drift_frac}};
    j["filter"] = {{"ma_window", filter.ma_window},
                   {"es_alpha", filter.es_alpha},
                   {"sg_window", filter.sg_window},
                   {"sg_order", filter.sg_order},
                   {"kf_process_var", filter.kf_process_var},
                   {"kf_measurement_var", filter.kf_measurement_var}};
    j["baseline"] = {{"stage1_abs_ppm", baseline.stage1_abs_ppm},
                     {"stage1_diff_ppm", baseline.stage1_diff_ppm},
                     {"stage2_abs_ppm", baseline.stage2_abs_ppm},
                     {"stage2_diff_ppm", baseline.stage2_diff_ppm},
                     {"co2_smooth_window", baseline.co2_smooth_window},
                     {"ch4_smooth_window", baseline.ch4_smooth_window},
                     {"presence_merge_gap_s", baseline.presence_merge_gap_s},
                     {"min_absence_frac", baseline.min_absence_frac}};
    j["events"] = {{"drop_min_ppm", events.drop_min_ppm},
                   {"drop_max_span_s", events.drop_max_span_s},
                   {"peak_min_prominence_ppm", events.peak_min_prominence_ppm},
                   {"peak_min_separation_s", events.peak_min_separation_s},
                   {"posture_window_s", events.posture_window_s},
                   {"feeding_lag_band_s", {events.feeding_lag_lo_s, events.feeding_lag_hi_s}}};
    j["xval"] = {{"scales_min", xval.scales_min},
                 {"step_s", xval.step_s},
                 {"min_valid_frac", xval.min_valid_frac},
                 {"q_threshold", xval.q_threshold},
                 {"min_valid_per_bin", xval.min_valid_per_bin},
                 {"jobs", xval.jobs}};
    j["sim"] = {{"seed", sim.seed},
                {"duration_h", sim.duration_h},
                {"start_epoch_s", sim.start_epoch_s},
                {"scout_dt_s", sim.scout_dt_s},
                {"sniffer_dt_s", sim.sniffer_dt_s},
                {"baseline_rumen_ppm", sim.baseline_rumen_ppm},
                {"fill_rate_ppm_s", sim.fill_rate_ppm_s},
                {"hood_fill_rate_ppm_s", sim.hood_fill_rate_ppm_s},
                {"quiet_fill_rate_ppm_s", sim.quiet_fill_rate_ppm_s},
                {"ceiling_ppm", sim.ceiling_ppm},
                {"floor_ppm", sim.floor_ppm},
                {"erupt_mean_interval_s", sim.erupt_mean_interval_s},
                {"erupt_min_interval_s", sim.erupt_min_interval_s},
                {"erupt_mag_ppm", {sim.erupt_mag_lo_ppm, sim.erupt_mag_hi_ppm}},
                {"erupt_span_s", {sim.erupt_span_lo_s, sim.erupt_span_hi_s}},
                {"scout_noise_sd_ppm", sim.scout_noise_sd_ppm},
                {"scout_resolution_ppm", sim.scout_resolution_ppm},
                {"scout_init_nan_rows", sim.scout_init_nan_rows},
                {"presence_bouts_per_day", sim.presence_bouts_per_day},
                {"presence_dur_s", {sim.presence_dur_lo_s, sim.presence_dur_hi_s}},
                {"dilution", {sim.dilution_lo, sim.dilution_hi}},
                {"vent_tau_s", sim.vent_tau_s},
                {"vent_away_tau_s", sim.vent_away_tau_s},
                {"sensor_tau_s", sim.sensor_tau_s},
                {"plume_tau_s", sim.plume_tau_s},
                {"spike_fraction", sim.spike_fraction},
                {"spike_tau_s", sim.spike_tau_s},
                {"sniffer_noise_sd_ppm", sim.sniffer_noise_sd_ppm},
                {"mixing_noise_sd", sim.mixing_noise_sd},
                {"mixing_noise_tau_s", sim.mixing_noise_tau_s},
                {"ambient_level_ppm", sim.ambient_level_ppm},
                {"ambient_slope_ppm_per_day", sim.ambient_slope_ppm_per_day},
                {"ambient_sin_amp_ppm", sim.ambient_sin_amp_ppm},
                {"co2_ambient_ppm", sim.co2_ambient_ppm},
                {"co2_presence_amp_ppm", sim.co2_presence_amp_ppm},
                {"co2_edge_tau_s", sim.co2_edge_tau_s},
                {"co2_release_tau_s", sim.co2_release_tau_s},
                {"co2_noise_sd_ppm", sim.co2_noise_sd_ppm},
                {"flow_nominal_l_min", sim.flow_nominal_l_min},
                {"flow_noise_sd", sim.flow_noise_sd},
                {"pump_resets_per_day", sim.pump_resets_per_day},
                {"reset_dur_s", {sim.reset_dur_lo_s, sim.reset_dur_hi_s}},
                {"clock_drift_s_per_day", sim.clock_drift_s_per_day},
                {"posture_events_per_day", sim.posture_events_per_day},
                {"posture_step_ppm", sim.posture_step_ppm},
                {"posture_decay_tau_s", sim.posture_decay_tau_s},
                {"feedings_per_day", sim.feedings_per_day},
                {"feeding_lag_s", sim.feeding_lag_s},
                {"feeding_pulse_ppm", sim.feeding_pulse_ppm},
                {"feeding_decay_tau_s", sim.feeding_decay_tau_s},
                {"temp_mean_c", sim.temp_mean_c},
                {"temp_amp_c", sim.temp_amp_c},
                {"pressure_mean_mbar", sim.pressure_mean_mbar},
                {"pressure_amp_mbar", sim.pressure_amp_mbar}};
    return j;
}

}  // namespace scout
