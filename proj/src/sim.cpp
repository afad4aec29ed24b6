#include "scout/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "json.hpp"
#include "scout/error.hpp"
#include "scout/mathutil.hpp"
#include "scout/units.hpp"

namespace scout::sim {

namespace {

using num::Rng;

struct ScheduledDrop {
    Timestamp t = 0.0;
    double magnitude = 0.0;
    double span_s = 4.0;
    bool vent_to_target = false;  // magnitude resolved at fire time
    double threshold = 0.0;       // fire only if rumen level exceeds this
    double target = 0.0;
};

double skip_quiet(const IntervalSet& quiet, Timestamp t, Rng& rng) {
    for (const auto& iv : quiet)
        if (iv.contains(t)) return iv.end + rng.uniform(5.0, 30.0);
    return t;
}

}  // namespace

SimResult simulate(const SimConfig& cfg) {
    if (!(cfg.duration_h > 0.0)) fail(Errc::config, "duration must be positive");
    if (!(cfg.sniffer_dt_s > 0.0) || !(cfg.scout_dt_s > 0.0))
        fail(Errc::config, "sampling intervals must be positive");
    const double ratio = cfg.scout_dt_s / cfg.sniffer_dt_s;
    if (std::fabs(ratio - std::round(ratio)) > 1e-9)
        fail(Errc::config, "scout_dt must be an integer multiple of sniffer_dt");
    if (cfg.dilution_lo < 1.0 || cfg.dilution_hi < cfg.dilution_lo)
        fail(Errc::config, "dilution range must be ordered and >= 1");
    const double T = cfg.duration_h * 3600.0;
    const Timestamp start = cfg.start_epoch_s;
    const double day_frac = cfg.duration_h / 24.0;

    Rng root(cfg.seed);
    Rng rng_presence = root.fork(1);
    Rng rng_sched = root.fork(2);
    Rng rng_magspan = root.fork(3);
    Rng rng_dilution = root.fork(4);
    Rng rng_scout_noise = root.fork(5);
    Rng rng_sniffer_noise = root.fork(6);
    Rng rng_co2_noise = root.fork(7);
    Rng rng_flow_noise = root.fork(8);
    Rng rng_resets = root.fork(9);
    Rng rng_posture = root.fork(10);
    Rng rng_prep = root.fork(11);

    SimResult res;
    SimTruth& truth = res.truth;
    truth.clock_drift_s_per_day = cfg.clock_drift_s_per_day;
    truth.posture_step_ppm = cfg.posture_step_ppm;
    truth.feeding_lag_s = cfg.feeding_lag_s;

    // --- presence bouts: one per equal slot, jittered, never overlapping.
    // Bouts that will carry a feeding event are kept short so the vent-free
    // response window never dominates the long correlation scales.
    const int n_bouts = std::max(0, static_cast<int>(std::lround(cfg.presence_bouts_per_day * day_frac)));
    const int n_feed = std::max(0, static_cast<int>(std::lround(cfg.feedings_per_day * day_frac)));
    std::vector<int> feeding_bout(static_cast<std::size_t>(std::max(0, n_bouts)), 0);
    for (int i = 0; i < n_feed && n_bouts > 0; ++i) {
        int idx = static_cast<int>(static_cast<long>(i) * n_bouts / std::max(1, n_feed));
        feeding_bout[static_cast<std::size_t>(std::min(idx, n_bouts - 1))] = 1;
    }
    IntervalSet presence;
    std::vector<Interval> bouts;
    if (n_bouts > 0) {
        const double slot = T / static_cast<double>(n_bouts);
        if (slot < cfg.presence_dur_lo_s + 900.0)
            fail(Errc::config, "presence schedule infeasible: slots too short for bout durations");
        for (int b = 0; b < n_bouts; ++b) {
            double dur = feeding_bout[static_cast<std::size_t>(b)]
                             ? rng_presence.uniform(1500.0, 1900.0)
                             : rng_presence.uniform(cfg.presence_dur_lo_s, cfg.presence_dur_hi_s);
            dur = std::min(dur, slot - 700.0);
            double s0 = slot * b + rng_presence.uniform(600.0, std::max(601.0, slot - dur - 60.0));
            Interval iv{start + s0, start + s0 + dur};
            bouts.push_back(iv);
            presence.add(iv);
            truth.presence.push_back(iv);
        }
    }

    std::vector<Timestamp> feed_times;
    for (int b = 0; b < n_bouts; ++b)
        if (feeding_bout[static_cast<std::size_t>(b)])
            feed_times.push_back(bouts[static_cast<std::size_t>(b)].start);
    std::sort(feed_times.begin(), feed_times.end());
    truth.feeding_events = feed_times;

    // --- posture events: rejection-sampled away from the hood and clear of
    // feeding response bands, so each transition sits on quiet rumen data
    const int n_post = std::max(0, static_cast<int>(std::lround(cfg.posture_events_per_day * day_frac)));
    std::vector<Timestamp> posture_times;
    for (int i = 0; i < n_post; ++i) {
        for (int attempt = 0; attempt < 4000; ++attempt) {
            Timestamp t = start + rng_posture.uniform(1200.0, T - 1200.0);
            bool ok = true;
            for (Timestamp other : posture_times)
                if (std::fabs(t - other) < 2400.0) ok = false;
            for (Timestamp tf : feed_times)
                if (t + 1000.0 > tf - 1200.0 && t - 1000.0 < tf + 3900.0) ok = false;
            for (const auto& iv : bouts)
                if (t + 1100.0 > iv.start && t - 1100.0 < iv.end) ok = false;
            if (ok) {
                posture_times.push_back(t);
                break;
            }
        }
    }
    std::sort(posture_times.begin(), posture_times.end());
    truth.posture_events = posture_times;

    // --- quiet zones keep the programmed responses measurable; a feeding
    // bout is vent-free throughout (eructation pauses while swallowing), so
    // it never enters the cross-platform analysis pool
    IntervalSet quiet;
    for (Timestamp tf : feed_times) quiet.add({tf - 60.0, tf + 3300.0});
    for (Timestamp tp : posture_times) quiet.add({tp - 940.0, tp + 1000.0});

    // --- pump resets
    const int n_resets = std::max(0, static_cast<int>(std::lround(cfg.pump_resets_per_day * day_frac)));
    IntervalSet resets;
    for (int i = 0; i < n_resets; ++i) {
        for (int attempt = 0; attempt < 4000; ++attempt) {
            double dur = rng_resets.uniform(cfg.reset_dur_lo_s, cfg.reset_dur_hi_s);
            Timestamp t = start + rng_resets.uniform(400.0, T - 400.0 - dur);
            Interval iv{t, t + dur};
            bool clear = true;
            for (const auto& other : resets)
                if (iv.start < other.end + 600.0 && other.start < iv.end + 600.0) clear = false;
            if (clear) {
                resets.add(iv);
                break;
            }
        }
    }
    for (const auto& iv : resets) truth.pump_resets.push_back(iv);

    // --- eructation schedule (regular venting), quiet zones skipped
    // Vents recur quasi-periodically (ruminal contractions are rhythmic);
    // gaps jitter +/-30% around the mean for the current context.
    std::deque<ScheduledDrop> schedule;
    {
        Timestamp t = start + cfg.erupt_start_margin_s +
                      cfg.erupt_mean_interval_s * rng_sched.uniform(0.7, 1.3);
        while (t < start + T - 60.0) {
            Timestamp moved = skip_quiet(quiet, t, rng_sched);
            if (moved != t) {
                t = moved;
                continue;
            }
            ScheduledDrop d;
            d.t = std::floor(t);
            d.magnitude = rng_magspan.uniform(cfg.erupt_mag_lo_ppm, cfg.erupt_mag_hi_ppm);
            d.span_s = std::max(1.0, std::round(rng_magspan.uniform(cfg.erupt_span_lo_s, cfg.erupt_span_hi_s)));
            schedule.push_back(d);
            double mean_gap = presence.contains(t) ? cfg.erupt_hood_interval_s
                                                   : cfg.erupt_mean_interval_s;
            t += std::max(cfg.erupt_min_interval_s, mean_gap * rng_sched.uniform(0.7, 1.3));
        }
    }
    // forced vents ahead of each programmed response keep headroom below the
    // ceiling; they fire only if the rumen level is high at that moment
    for (Timestamp tp : posture_times) {
        ScheduledDrop d;
        d.t = std::floor(tp - 960.0);
        d.vent_to_target = true;
        d.threshold = std::min(cfg.ceiling_ppm - cfg.posture_step_ppm - 3000.0,
                               cfg.baseline_rumen_ppm + 8000.0);
        d.target = cfg.baseline_rumen_ppm;
        d.span_s = std::max(1.0, std::round(rng_prep.uniform(4.0, 10.0)));
        schedule.push_back(d);
    }
    for (Timestamp tf : feed_times) {
        ScheduledDrop d;
        d.t = std::floor(tf - 120.0);  // before the hood entry, outside the quiet span
        d.vent_to_target = true;
        d.threshold = std::min(cfg.ceiling_ppm - cfg.feeding_pulse_ppm - 3000.0,
                               cfg.baseline_rumen_ppm + 8000.0);
        d.target = cfg.baseline_rumen_ppm;
        d.span_s = std::max(1.0, std::round(rng_prep.uniform(4.0, 10.0)));
        schedule.push_back(d);
    }
    std::sort(schedule.begin(), schedule.end(),
              [](const ScheduledDrop& a, const ScheduledDrop& b) { return a.t < b.t; });

    // --- master loop at the sniffer cadence
    const double dt = cfg.sniffer_dt_s;
    const auto n_steps = static_cast<std::size_t>(std::llround(T / dt));
    const auto scout_every = static_cast<std::size_t>(std::llround(ratio));

    double rumen = cfg.baseline_rumen_ppm;
    double disturb_posture = 0.0, disturb_feeding = 0.0;
    const double posture_decay = std::exp(-dt / cfg.posture_decay_tau_s);
    const double feeding_decay = std::exp(-dt / cfg.feeding_decay_tau_s);
    const double slug_decay_hood = std::exp(-dt / cfg.vent_tau_s);
    const double slug_decay_away = std::exp(-dt / cfg.vent_away_tau_s);
    const double sensor_gain = 1.0 - std::exp(-dt / cfg.sensor_tau_s);
    const double co2_gain_attack = 1.0 - std::exp(-dt / cfg.co2_edge_tau_s);
    const double co2_gain_release = 1.0 - std::exp(-dt / cfg.co2_release_tau_s);
    const double two_pi = 6.283185307179586;

    double slug = 0.0;   // hood-accumulated vented gas
    double plume = 0.0;  // vented gas still in transit to the sampling point
    double spike = 0.0;  // direct transient passing the sampling point
    const double plume_gain = 1.0 - std::exp(-dt / cfg.plume_tau_s);
    const double spike_decay = std::exp(-dt / cfg.spike_tau_s);
    double mixing = 0.0;  // OU deviation of the head-position mixing factor
    const double mix_decay = std::exp(-dt / cfg.mixing_noise_tau_s);
    const double mix_step = cfg.mixing_noise_sd * std::sqrt(1.0 - mix_decay * mix_decay);
    Rng rng_mixing = root.fork(13);
    double ch4_sensor = cfg.ambient_level_ppm;
    double co2_level = cfg.co2_ambient_ppm;

    struct ActiveDrop {
        double per_step = 0.0;
        std::size_t steps_left = 0;
        Timestamp started = 0.0;
        double applied = 0.0;
        double dilution = 0.0;  // 0 when outside presence
        long pulse_idx = -1;
    };
    ActiveDrop active;
    bool drop_running = false;

    std::deque<Timestamp> posture_fire(posture_times.begin(), posture_times.end());
    std::deque<Timestamp> feeding_fire;
    for (Timestamp tf : feed_times) feeding_fire.push_back(tf + cfg.feeding_lag_s);

    // dilution: one draw per hood visit (head geometry holds within a visit),
    // with a per-eructation jitter on top
    const double ln_lo = std::log(cfg.dilution_lo), ln_hi = std::log(cfg.dilution_hi);
    std::vector<double> bout_dilution;
    bout_dilution.reserve(bouts.size());
    for (std::size_t b = 0; b < bouts.size(); ++b)
        bout_dilution.push_back(std::exp(rng_dilution.uniform(ln_lo, ln_hi)));
    auto draw_dilution = [&](Timestamp t) {
        double base = std::sqrt(cfg.dilution_lo * cfg.dilution_hi);
        for (std::size_t b = 0; b < bouts.size(); ++b)
            if (bouts[b].contains(t)) {
                base = bout_dilution[b];
                break;
            }
        const double ln_jitter = 0.6931471805599453;
        double d = base * std::exp(rng_dilution.uniform(-ln_jitter, ln_jitter));
        return std::clamp(d, cfg.dilution_lo, cfg.dilution_hi);
    };

    res.sniffer.reserve(n_steps);
    res.scout.reserve(n_steps / scout_every + 1);
    truth.true_ambient = Series::uniform(start, 60.0, static_cast<std::size_t>(T / 60.0), Unit::ppm);

    auto finish_drop = [&](Timestamp now) {
        truth.eructations.push_back({active.started, now, active.applied});
        if (active.pulse_idx >= 0) {
            auto& pulse = truth.pulses[static_cast<std::size_t>(active.pulse_idx)];
            pulse.eructation_index = truth.eructations.size() - 1;
            pulse.peak_ppm = active.applied / active.dilution;  // hood contribution
        }
        drop_running = false;
    };

    for (std::size_t i = 0; i < n_steps; ++i) {
        const Timestamp t = start + static_cast<double>(i) * dt;
        const double elapsed = t - start;

        // fire the next scheduled vent once no drop is in progress
        if (!drop_running && !schedule.empty() && schedule.front().t <= t) {
            ScheduledDrop d = schedule.front();
            schedule.pop_front();
            double mag = d.magnitude;
            if (d.vent_to_target) {
                mag = rumen > d.threshold ? rumen - d.target : 0.0;
            } else {
                // a vent from a near-empty rumen releases nothing measurable
                mag = std::min(mag, rumen - cfg.floor_ppm);
                if (mag < 0.75 * cfg.erupt_mag_lo_ppm) mag = 0.0;
            }
            if (mag >= 1.0) {
                active.per_step = mag / d.span_s * dt;
                active.steps_left = static_cast<std::size_t>(std::llround(d.span_s / dt));
                active.started = t;
                active.applied = 0.0;
                active.dilution = 0.0;
                active.pulse_idx = -1;
                if (presence.contains(t)) {
                    active.dilution = draw_dilution(t);
                    truth.pulses.push_back({t, 0.0, 0});
                    active.pulse_idx = static_cast<long>(truth.pulses.size()) - 1;
                }
                drop_running = true;
            }
        }

        // rumen dynamics: fill between vents, drop sharply during one
        if (drop_running) {
            double applied = std::min(active.per_step, rumen - cfg.floor_ppm);
            applied = std::max(0.0, applied);
            rumen -= applied;
            active.applied += applied;
            if (active.dilution > 0.0) {
                double hood_in = applied / active.dilution;
                spike += cfg.spike_fraction * hood_in;
                plume += (1.0 - cfg.spike_fraction) * hood_in;
            }
            if (--active.steps_left == 0) finish_drop(t + dt);
        } else {
            double fill = quiet.contains(t)      ? cfg.quiet_fill_rate_ppm_s
                          : presence.contains(t) ? cfg.hood_fill_rate_ppm_s
                                                 : cfg.fill_rate_ppm_s;
            rumen = std::min(cfg.ceiling_ppm, rumen + fill * dt);
        }

        // programmed behavior responses in the headspace
        if (!posture_fire.empty() && posture_fire.front() <= t) {
            posture_fire.pop_front();
            disturb_posture += cfg.posture_step_ppm;
        }
        if (!feeding_fire.empty() && feeding_fire.front() <= t) {
            feeding_fire.pop_front();
            disturb_feeding += cfg.feeding_pulse_ppm;
        }
        disturb_posture *= posture_decay;
        disturb_feeding *= feeding_decay;

        // hood channel: part of each vent passes the sampling point as a
        // sharp transient; the rest drifts in through a transport delay and
        // accumulates while the head is in, purging once it leaves
        spike *= spike_decay;
        double transferred = plume_gain * plume;
        plume -= transferred;
        slug += transferred;
        slug *= presence.contains(t) ? slug_decay_hood : slug_decay_away;
        const double ambient = cfg.ambient_level_ppm +
                               cfg.ambient_slope_ppm_per_day * elapsed / 86400.0 +
                               cfg.ambient_sin_amp_ppm * std::sin(two_pi * elapsed / 86400.0 - 1.5707963267948966);
        mixing = mixing * mix_decay + rng_mixing.normal(0.0, mix_step);
        const double mix_factor = std::clamp(1.0 + mixing, 0.3, 1.7);
        ch4_sensor += sensor_gain * ((ambient + (slug + spike) * mix_factor) - ch4_sensor);
        const double co2_target = cfg.co2_ambient_ppm + (presence.contains(t) ? cfg.co2_presence_amp_ppm : 0.0);
        co2_level += (co2_target > co2_level ? co2_gain_attack : co2_gain_release) *
                     (co2_target - co2_level);

        const double temp_c = cfg.temp_mean_c + cfg.temp_amp_c * std::sin(two_pi * elapsed / 86400.0 + 0.6);
        const double pressure = cfg.pressure_mean_mbar +
                                cfg.pressure_amp_mbar * std::sin(two_pi * elapsed / (2.0 * 86400.0) + 1.1);

        double flow = cfg.flow_nominal_l_min + rng_flow_noise.normal(0.0, cfg.flow_noise_sd);
        for (const auto& iv : resets) {
            if (!iv.contains(t)) continue;
            double progress = (t - iv.start) / iv.length();
            double base = progress < 0.7 ? 0.08
                                         : 0.08 + (cfg.flow_nominal_l_min - 0.08) * (progress - 0.7) / 0.3;
            flow = base + rng_flow_noise.normal(0.0, 0.005);
            break;
        }

        SnifferRecord rec;
        rec.t = t;
        double ch4_ppm = ch4_sensor + rng_sniffer_noise.normal(0.0, cfg.sniffer_noise_sd_ppm);
        double co2_ppm = co2_level + rng_co2_noise.normal(0.0, cfg.co2_noise_sd_ppm);
        rec.ch4_mg_m3 = ppm_to_mg_m3(std::max(0.0, ch4_ppm), temp_c, pressure, GasConstants::M_CH4);
        rec.co2_mg_m3 = ppm_to_mg_m3(std::max(0.0, co2_ppm), temp_c, pressure, GasConstants::M_CO2);
        rec.flow_l_min = std::max(0.0, flow);
        rec.temp_c = temp_c;
        rec.pressure_mbar = pressure;
        res.sniffer.push_back(rec);

        // in-rumen sample on the coarse grid
        if (i % scout_every == 0) {
            ScoutRecord srec;
            const double offset = cfg.clock_drift_s_per_day * elapsed / 86400.0;
            srec.t = t + offset;
            double gas = std::clamp(rumen + disturb_posture + disturb_feeding, 0.0, cfg.ceiling_ppm);
            double noisy = gas + rng_scout_noise.normal(0.0, cfg.scout_noise_sd_ppm);
            double quantized = std::round(noisy / cfg.scout_resolution_ppm) * cfg.scout_resolution_ppm;
            quantized = std::clamp(quantized, 0.0, cfg.ceiling_ppm);
            if (static_cast<int>(res.scout.size()) < cfg.scout_init_nan_rows) {
                srec.ch4_ppm = std::nullopt;  // start-up rows log NaN
                srec.status = "INIT";
            } else {
                srec.ch4_ppm = quantized;
                srec.status = "OK";
            }
            srec.temp_c = 38.8 + 0.4 * std::sin(two_pi * elapsed / 86400.0 + 2.0) +
                          rng_scout_noise.normal(0.0, 0.02);
            res.scout.push_back(srec);
        }

        // decimated noise-free ambient for baseline scoring
        if (std::fmod(elapsed, 60.0) < dt * 0.5) {
            auto k = static_cast<std::size_t>(std::llround(elapsed / 60.0));
            if (k < truth.true_ambient.size()) truth.true_ambient.set(k, ambient);
        }
    }
    if (drop_running) finish_drop(start + T);

    // behavior log: hood occupancy, feeding spans, alternating postures
    for (const auto& iv : bouts)
        res.behavior.push_back({iv.start, iv.end, BehaviorLabel::head_in_hood});
    for (std::size_t i = 0; i < feed_times.size(); ++i) {
        Timestamp tf = feed_times[i];
        for (const auto& iv : bouts)
            if (iv.contains(tf)) {
                res.behavior.push_back({tf, std::min(iv.end, tf + 1200.0), BehaviorLabel::feeding});
                break;
            }
    }
    for (std::size_t i = 0; i < posture_times.size(); ++i)
        res.behavior.push_back({posture_times[i], posture_times[i] + 600.0,
                                i % 2 == 0 ? BehaviorLabel::sitting : BehaviorLabel::standing});
    std::stable_sort(res.behavior.begin(), res.behavior.end(),
                     [](const BehaviorInterval& a, const BehaviorInterval& b) {
                         return a.start < b.start;
                     });

    // deployment-record anchors for the software clock correction
    const Timestamp end_true = start + T - std::fmod(T, cfg.scout_dt_s);
    truth.drift_anchors.push_back({start, start});
    truth.drift_anchors.push_back(
        {end_true + cfg.clock_drift_s_per_day * (end_true - start) / 86400.0, end_true});

    return res;
}

namespace {

using nlohmann::ordered_json;

ordered_json interval_json(const Interval& iv) {
    return ordered_json{{"start", iv.start}, {"end", iv.end}};
}

}  // namespace

std::string truth_to_json(const SimTruth& truth) {
    ordered_json j;
    j["schema"] = "sim_truth/1";
    j["clock_drift_s_per_day"] = truth.clock_drift_s_per_day;
    j["posture_step_ppm"] = truth.posture_step_ppm;
    j["feeding_lag_s"] = truth.feeding_lag_s;
    j["eructations"] = ordered_json::array();
    for (const auto& e : truth.eructations)
        j["eructations"].push_back(
            {{"start", e.start}, {"end", e.end}, {"magnitude_ppm", e.magnitude_ppm}});
    j["presence"] = ordered_json::array();
    for (const auto& iv : truth.presence) j["presence"].push_back(interval_json(iv));
    j["pump_resets"] = ordered_json::array();
    for (const auto& iv : truth.pump_resets) j["pump_resets"].push_back(interval_json(iv));
    j["feeding_events"] = truth.feeding_events;
    j["posture_events"] = truth.posture_events;
    j["pulses"] = ordered_json::array();
    for (const auto& p : truth.pulses)
        j["pulses"].push_back({{"t", p.t},
                               {"peak_ppm", p.peak_ppm},
                               {"eructation_index", p.eructation_index}});
    j["drift_anchors"] = ordered_json::array();
    for (const auto& a : truth.drift_anchors)
        j["drift_anchors"].push_back({{"logged_t", a.logged_t}, {"true_t", a.true_t}});
    j["true_ambient"] = {{"t0", truth.true_ambient.t0},
                         {"dt", truth.true_ambient.dt},
                         {"values", truth.true_ambient.values}};
    return j.dump(2) + "\n";
}

SimTruth truth_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    SimTruth truth;
    truth.clock_drift_s_per_day = j.at("clock_drift_s_per_day").get<double>();
    truth.posture_step_ppm = j.at("posture_step_ppm").get<double>();
    truth.feeding_lag_s = j.at("feeding_lag_s").get<double>();
    for (const auto& e : j.at("eructations"))
        truth.eructations.push_back({e.at("start").get<double>(), e.at("end").get<double>(),
                                     e.at("magnitude_ppm").get<double>()});
    for (const auto& iv : j.at("presence"))
        truth.presence.push_back({iv.at("start").get<double>(), iv.at("end").get<double>()});
    for (const auto& iv : j.at("pump_resets"))
        truth.pump_resets.push_back({iv.at("start").get<double>(), iv.at("end").get<double>()});
    truth.feeding_events = j.at("feeding_events").get<std::vector<double>>();
    truth.posture_events = j.at("posture_events").get<std::vector<double>>();
    for (const auto& p : j.at("pulses"))
        truth.pulses.push_back({p.at("t").get<double>(), p.at("peak_ppm").get<double>(),
                                p.at("eructation_index").get<std::size_t>()});
    for (const auto& a : j.at("drift_anchors"))
        truth.drift_anchors.push_back(
            {a.at("logged_t").get<double>(), a.at("true_t").get<double>()});
    const auto& amb = j.at("true_ambient");
    auto values = amb.at("values").get<std::vector<double>>();
    truth.true_ambient = Series::uniform(amb.at("t0").get<double>(), amb.at("dt").get<double>(),
                                         values.size(), Unit::ppm);
    for (std::size_t i = 0; i < values.size(); ++i) truth.true_ambient.set(i, values[i]);
    return truth;
}

ScoreReport score_pipeline(const SimTruth& truth, const PipelineOutputs& out) {
    ScoreReport rep;

    if (out.eructations) {
        // recall: a truth vent is found if some detected drop overlaps it;
        // precision: a detected drop is genuine if it overlaps a truth vent
        // stretched by the detector's span budget on the left (a drop that
        // starts on a saturated shelf is anchored up to one span early)
        const double pad_left = 70.0, pad_right = 20.0;
        std::size_t hit = 0;
        for (const auto& e : truth.eructations) {
            Interval iv{e.start - 1.0, e.end + 10.0};
            for (const auto& d : *out.eructations)
                if (iv.overlaps({d.start, d.end + 1.0})) {
                    ++hit;
                    break;
                }
        }
        rep.eructation_recall = truth.eructations.empty()
                                    ? 1.0
                                    : static_cast<double>(hit) /
                                          static_cast<double>(truth.eructations.size());
        std::size_t genuine = 0;
        for (const auto& d : *out.eructations) {
            bool match = false;
            for (const auto& e : truth.eructations)
                if (Interval{e.start - pad_left, e.end + pad_right}.overlaps(
                        {d.start, d.end + 1.0}))
                    match = true;
            genuine += match;
        }
        rep.eructation_false_positives = out.eructations->size() - genuine;
        rep.eructation_precision = out.eructations->empty()
                                       ? 1.0
                                       : static_cast<double>(genuine) /
                                             static_cast<double>(out.eructations->size());
    }

    if (out.excluded) {
        bool all = true;
        for (const auto& r : truth.pump_resets)
            if (out.excluded->overlap_length(r) <= 0.0) all = false;
        rep.resets_all_recovered = all;
    }

    if (out.presence) {
        IntervalSet truth_presence(truth.presence);
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < out.presence->size(); ++i) {
            Timestamp t = out.presence_t0 + out.presence_dt * static_cast<double>(i);
            bool truth_on = truth_presence.contains(t);
            bool flagged = out.presence->is_flagged(i);
            tp += (truth_on && flagged);
            fp += (!truth_on && flagged);
            fn += (truth_on && !flagged);
        }
        rep.presence_recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
        rep.presence_precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
    }

    if (out.baseline) {
        IntervalSet truth_presence(truth.presence);
        double se = 0.0, amb_sum = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < truth.true_ambient.size(); ++k) {
            Timestamp t = truth.true_ambient.time_at(k);
            if (!truth.true_ambient.is_valid(k) || truth_presence.contains(t)) continue;
            long idx = out.baseline->index_of(t);
            if (idx < 0 || idx >= static_cast<long>(out.baseline->size())) continue;
            auto i = static_cast<std::size_t>(idx);
            if (!out.baseline->is_valid(i)) continue;
            double err = out.baseline->values[i] - truth.true_ambient.values[k];
            se += err * err;
            amb_sum += truth.true_ambient.values[k];
            ++n;
        }
        if (n > 0) {
            rep.baseline_rmse_ppm = std::sqrt(se / static_cast<double>(n));
            double mean_amb = amb_sum / static_cast<double>(n);
            rep.baseline_rmse_frac = mean_amb > 0.0 ? rep.baseline_rmse_ppm / mean_amb : -1.0;
        }
    }

    if (out.posture && truth.posture_step_ppm > 0.0) {
        rep.posture_mean_ppm = out.posture->mean_ppm;
        rep.posture_err_frac =
            std::fabs(out.posture->mean_ppm - truth.posture_step_ppm) / truth.posture_step_ppm;
    }

    if (out.feeding) {
        rep.feeding_lag_s = out.feeding->lag_s;
        rep.feeding_lag_err_s = std::fabs(out.feeding->lag_s - truth.feeding_lag_s);
    }
    return rep;
}

std::string score_to_json(const ScoreReport& rep) {
    ordered_json j;
    j["schema"] = "pipeline_score/1";
    j["eructation_recall"] = rep.eructation_recall;
    j["eructation_precision"] = rep.eructation_precision;
    j["eructation_false_positives"] = rep.eructation_false_positives;
    j["resets_all_recovered"] = rep.resets_all_recovered;
    j["presence_recall"] = rep.presence_recall;
    j["presence_precision"] = rep.presence_precision;
    j["baseline_rmse_ppm"] = rep.baseline_rmse_ppm;
    j["baseline_rmse_frac"] = rep.baseline_rmse_frac;
    j["posture_mean_ppm"] = rep.posture_mean_ppm;
    j["posture_err_frac"] = rep.posture_err_frac;
    j["feeding_lag_s"] = rep.feeding_lag_s;
    j["feeding_lag_err_s"] = rep.feeding_lag_err_s;
    return j.dump(2) + "\n";
}

}  // namespace scout::sim
