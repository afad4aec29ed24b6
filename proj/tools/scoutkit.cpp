// scoutkit: command-line front end for the paired in-rumen / hood-sampler
// methane pipeline. Stages are composable over files and re-runnable; every
// product is accompanied by a manifest citing its inputs' checksums.
//
// Exit codes: 0 ok, 2 config error, 3 schema/row error, 4 missing upstream
// product, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scout/baseline.hpp"
#include "scout/clock.hpp"
#include "scout/config.hpp"
#include "scout/csv.hpp"
#include "scout/error.hpp"
#include "scout/events.hpp"
#include "scout/filters.hpp"
#include "scout/ioutil.hpp"
#include "scout/qc.hpp"
#include "scout/sim.hpp"
#include "scout/stats.hpp"
#include "scout/units.hpp"
#include "scout/xval.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace scout;

namespace {

constexpr double kScoutDt = 1.0 / kScoutSensor.sample_hz;    // 10 s nominal grid
constexpr double kSnifferDt = 1.0 / kSnifferSensor.sample_hz;  // 1 s nominal grid

struct CliError {
    int exit_code;
    std::string message;
};

std::string product(const RunConfig& cfg, const char* name) {
    return (fs::path(cfg.out_dir) / name).string();
}

std::string require_product(const RunConfig& cfg, const char* name, const char* stage) {
    std::string path = product(cfg, name);
    if (!fs::exists(path))
        throw CliError{4, "missing " + path + "; run 'scoutkit " + stage + "' first"};
    return path;
}

std::string input_or(const std::string& override_path, const RunConfig& cfg, const char* name) {
    if (!override_path.empty()) return override_path;
    return product(cfg, name);
}

void write_manifest(const RunConfig& cfg, const std::string& stage,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, ordered_json extra = {}) {
    auto j = io::make_manifest(stage, cfg.echo(), inputs, outputs);
    if (!extra.is_null()) j["stage_log"] = std::move(extra);
    io::atomic_write(product(cfg, (stage + "_manifest.json").c_str()), j.dump(2) + "\n");
}

// overlay the initialization window onto an exclusion classification
void mark_warmup(const Series& s, double warmup_s, std::vector<SampleClass>* classes) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.time_at(i) - s.t0 >= warmup_s) break;
        if ((*classes)[i] == SampleClass::missing) (*classes)[i] = SampleClass::warmup;
    }
}

int cmd_simulate(const RunConfig& cfg) {
    auto result = sim::simulate(cfg.sim);
    fs::create_directories(cfg.out_dir);
    std::ostringstream scout_csv, sniffer_csv, behavior_csv;
    write_scout_csv(scout_csv, result.scout);
    write_sniffer_csv(sniffer_csv, result.sniffer);
    write_behavior_csv(behavior_csv, result.behavior);
    io::atomic_write(product(cfg, "scout.csv"), scout_csv.str());
    io::atomic_write(product(cfg, "sniffer.csv"), sniffer_csv.str());
    io::atomic_write(product(cfg, "behavior.csv"), behavior_csv.str());
    io::atomic_write(product(cfg, "truth.json"), sim::truth_to_json(result.truth));
    std::cerr << "simulate: " << result.scout.size() << " scout rows, "
              << result.sniffer.size() << " sniffer rows, " << result.truth.eructations.size()
              << " eructations\n";
    return 0;
}

int cmd_clean(RunConfig& cfg, const std::string& scout_path, const std::string& sniffer_path) {
    const std::string scout_in = input_or(scout_path, cfg, "scout.csv");
    const std::string sniffer_in = input_or(sniffer_path, cfg, "sniffer.csv");
    if (!fs::exists(scout_in)) throw CliError{4, "missing input " + scout_in};
    if (!fs::exists(sniffer_in)) throw CliError{4, "missing input " + sniffer_in};
    fs::create_directories(cfg.out_dir);
    ordered_json log = ordered_json::array();
    auto log_stage = [&](const char* stage, std::size_t before, std::size_t after) {
        log.push_back({{"stage", stage}, {"valid_before", before}, {"valid_after", after}});
        std::cerr << "clean: " << stage << " valid " << before << " -> " << after << "\n";
    };

    // ---- in-rumen channel
    auto scout_parse = parse_scout_csv(io::read_file(scout_in));
    if (cfg.drift_anchors.size() >= 2) {
        correct_clock_drift(scout_parse.records, cfg.drift_anchors);
    } else if (!cfg.drift_anchors.empty()) {
        fail(Errc::config, "drift correction needs at least 2 anchors");
    }
    auto scout_grid = to_series(scout_parse.records, kScoutDt, Unit::ppm,
                                [](const ScoutRecord& r) { return r.ch4_ppm; });
    std::size_t v0 = scout_grid.series.valid_count();
    auto scout_series = strip_initialization(scout_grid.series, cfg.qc);
    log_stage("scout_strip_init", v0, scout_series.valid_count());
    auto drops_for_class = detect_eructations(scout_series, cfg.events);
    IntervalSet drop_ivs;
    for (const auto& e : drops_for_class) drop_ivs.add({e.start, e.end + kScoutDt});
    auto scout_classes = classify_scout(scout_series, cfg.qc, drop_ivs);
    auto scout_report = retention_report(scout_classes);
    io::atomic_write(product(cfg, "scout_clean.csv"),
                     io::classified_series_to_csv(scout_series, scout_classes, "ch4_ppm"));

    // ---- hood channel
    auto sniffer_parse = parse_sniffer_csv(io::read_file(sniffer_in));
    const auto& recs = sniffer_parse.records;
    auto ch4_mass = to_series(recs, kSnifferDt, Unit::mg_m3,
                              [](const SnifferRecord& r) { return r.ch4_mg_m3; });
    auto co2_mass = to_series(recs, kSnifferDt, Unit::mg_m3,
                              [](const SnifferRecord& r) { return r.co2_mg_m3; });
    auto flow = to_series(recs, kSnifferDt, Unit::l_min,
                          [](const SnifferRecord& r) { return r.flow_l_min; });
    auto temp = to_series(recs, kSnifferDt, Unit::celsius,
                          [](const SnifferRecord& r) { return r.temp_c; });
    auto pressure = to_series(recs, kSnifferDt, Unit::mbar,
                              [](const SnifferRecord& r) { return r.pressure_mbar; });

    std::size_t s0 = ch4_mass.series.valid_count();
    auto ch4_stripped = strip_initialization(ch4_mass.series, cfg.qc);
    auto co2_stripped = strip_initialization(co2_mass.series, cfg.qc);
    log_stage("sniffer_strip_init", s0, ch4_stripped.valid_count());

    auto resets = detect_pump_resets(flow.series, cfg.qc);
    auto ch4_excl = apply_exclusions(ch4_stripped, resets, flow.series, cfg.qc);
    auto co2_excl = apply_exclusions(co2_stripped, resets, flow.series, cfg.qc);
    log_stage("sniffer_exclusions", ch4_stripped.valid_count(), ch4_excl.series.valid_count());
    auto sniffer_classes = ch4_excl.classes;
    mark_warmup(ch4_excl.series, cfg.qc.warmup_s, &sniffer_classes);
    auto sniffer_report = retention_report(sniffer_classes);

    auto ch4_ppm = convert_series(ch4_excl.series, temp.series, pressure.series, Gas::CH4);
    auto co2_ppm = convert_series(co2_excl.series, temp.series, pressure.series, Gas::CO2);
    log_stage("sniffer_convert", ch4_excl.series.valid_count(), ch4_ppm.series.valid_count());

    auto ch4_sg = savitzky_golay(ch4_ppm.series, cfg.filter.sg_window, cfg.filter.sg_order);
    auto co2_sg = savitzky_golay(co2_ppm.series, cfg.filter.sg_window, cfg.filter.sg_order);
    log_stage("sniffer_sg_filter", ch4_ppm.series.valid_count(), ch4_sg.valid_count());

    io::atomic_write(product(cfg, "sniffer_clean.csv"),
                     io::sniffer_clean_to_csv(ch4_sg, co2_sg, flow.series, sniffer_classes));
    io::atomic_write(product(cfg, "exclusions.csv"),
                     io::intervals_to_csv(ch4_excl.padded_events));

    ordered_json qc;
    qc["schema"] = "qc_report/1";
    qc["scout"] = io::qc_report_json(scout_report);
    qc["sniffer"] = io::qc_report_json(sniffer_report);
    qc["warnings"] = {{"scout_missing_ch4", scout_parse.missing_ch4},
                      {"scout_duplicate_rows", scout_grid.duplicates},
                      {"sniffer_missing_fields", sniffer_parse.missing_fields},
                      {"sniffer_duplicate_rows", ch4_mass.duplicates},
                      {"convert_invalidated_ch4", ch4_ppm.invalidated},
                      {"convert_invalidated_co2", co2_ppm.invalidated}};
    qc["config"] = cfg.echo();
    io::atomic_write(product(cfg, "qc_report.json"), qc.dump(2) + "\n");
    write_manifest(cfg, "clean", {scout_in, sniffer_in},
                   {"scout_clean.csv", "sniffer_clean.csv", "exclusions.csv", "qc_report.json"},
                   log);
    return 0;
}

int cmd_baseline(RunConfig& cfg) {
    auto clean_path = require_product(cfg, "sniffer_clean.csv", "clean");
    auto clean = io::sniffer_clean_from_csv(io::read_file(clean_path));

    auto stage1 = detect_presence_stage1(clean.co2_ppm, cfg.baseline);
    auto stage2 = refine_presence_stage2(clean.co2_ppm, stage1.mask, cfg.baseline);
    auto base = ambient_baseline(clean.ch4_ppm, stage2.mask, cfg.baseline);
    auto normalized = normalize(clean.ch4_ppm, base.baseline);
    auto runs = presence_intervals(stage2.mask, clean.co2_ppm.t0, clean.co2_ppm.dt, 0.0);
    auto stats = presence_stats(stage2.mask, clean.co2_ppm.t0, clean.co2_ppm.dt,
                                cfg.baseline.presence_merge_gap_s);

    io::atomic_write(product(cfg, "presence.csv"), io::intervals_to_csv(runs));
    io::atomic_write(product(cfg, "baseline.csv"),
                     io::series_to_csv(base.baseline, "baseline_ppm"));
    io::atomic_write(product(cfg, "normalized.csv"), io::series_to_csv(normalized, "ch4_ppm"));

    ordered_json log;
    log["stage1_flagged"] = stage1.mask.flagged_count();
    log["stage2_flagged"] = stage2.mask.flagged_count();
    log["empty_days"] = stage1.empty_days;
    log["window_fallback"] = stage2.window_fallback;
    log["low_confidence_days"] = base.low_confidence_days;
    log["presence"] = {{"pct_time", stats.pct_time},
                       {"events_per_day", stats.events_per_day},
                       {"mean_event_duration_s", stats.mean_event_duration_s}};
    write_manifest(cfg, "baseline", {clean_path},
                   {"presence.csv", "baseline.csv", "normalized.csv"}, log);
    std::cerr << "baseline: " << stats.pct_time << "% presence, "
              << runs.size() << " raw windows\n";
    return 0;
}

int cmd_detect(RunConfig& cfg, const std::string& behavior_path) {
    auto scout_path = require_product(cfg, "scout_clean.csv", "clean");
    auto normalized_path = require_product(cfg, "normalized.csv", "baseline");
    auto [scout_series, scout_classes] =
        io::classified_series_from_csv(io::read_file(scout_path), Unit::ppm);
    auto normalized = io::series_from_csv(io::read_file(normalized_path), Unit::ppm);

    auto drops = detect_eructations(scout_series, cfg.events);
    auto peaks = detect_peaks(normalized, cfg.events);
    std::vector<EmissionEvent> all = drops;
    all.insert(all.end(), peaks.begin(), peaks.end());
    std::ostringstream events_csv;
    write_events_csv(events_csv, all);
    io::atomic_write(product(cfg, "events.csv"), events_csv.str());

    ordered_json response;
    response["schema"] = "behavior_response/1";
    std::vector<std::string> inputs = {scout_path, normalized_path};
    std::string behavior_in = input_or(behavior_path, cfg, "behavior.csv");
    if (fs::exists(behavior_in)) {
        auto behavior = parse_behavior_csv(io::read_file(behavior_in), cfg.session_date);
        auto posture = posture_response(scout_series, behavior.intervals, cfg.events);
        response["posture"] = {{"n", posture.n},
                               {"mean_ppm", posture.mean_ppm},
                               {"sd_ppm", posture.sd_ppm},
                               {"mean_latency_s", posture.mean_latency_s},
                               {"sd_latency_s", posture.sd_latency_s},
                               {"censored", posture.censored},
                               {"skipped", posture.skipped}};
        std::vector<Timestamp> feeding_starts;
        for (const auto& iv : behavior.intervals)
            if (iv.label == BehaviorLabel::feeding) feeding_starts.push_back(iv.start);
        if (feeding_starts.size() >= 3) {
            auto lag = feeding_lag(scout_series, feeding_starts, cfg.events);
            response["feeding"] = {{"lag_s", lag.lag_s},
                                   {"confidence", lag.confidence},
                                   {"inconclusive", lag.inconclusive},
                                   {"n_events", lag.n_events}};
        }
        inputs.push_back(behavior_in);
    }
    io::atomic_write(product(cfg, "behavior_response.json"), response.dump(2) + "\n");

    ordered_json log;
    log["eructation_drops"] = drops.size();
    log["sniffer_peaks"] = peaks.size();
    write_manifest(cfg, "detect", inputs, {"events.csv", "behavior_response.json"}, log);
    std::cerr << "detect: " << drops.size() << " drops, " << peaks.size() << " peaks\n";
    return 0;
}

int cmd_xval(RunConfig& cfg) {
    auto scout_path = require_product(cfg, "scout_clean.csv", "clean");
    auto normalized_path = require_product(cfg, "normalized.csv", "baseline");
    auto presence_path = require_product(cfg, "presence.csv", "baseline");
    auto events_path = require_product(cfg, "events.csv", "detect");

    auto [scout_series, scout_classes] =
        io::classified_series_from_csv(io::read_file(scout_path), Unit::ppm);
    auto normalized = io::series_from_csv(io::read_file(normalized_path), Unit::ppm);
    auto presence = io::intervals_from_csv(io::read_file(presence_path));
    std::istringstream events_in(io::read_file(events_path));
    auto all_events = read_events_csv(events_in);
    std::vector<EmissionEvent> drops;
    for (const auto& e : all_events)
        if (e.kind == EventKind::eructation_drop) drops.push_back(e);

    auto pairs = align_pair(scout_series, normalized, cfg.xval.min_valid_per_bin);
    int min_scale = *std::min_element(cfg.xval.scales_min.begin(), cfg.xval.scales_min.end());
    auto segments = gate_events(pairs, presence, drops, min_scale * 60.0);
    auto stats = window_sweep(pairs, segments, cfg.xval);
    auto summaries = scale_summary(stats, cfg.xval.q_threshold);

    std::ostringstream ws_csv, sc_csv;
    write_window_stats_csv(ws_csv, stats);
    write_scale_summary_csv(sc_csv, summaries);
    io::atomic_write(product(cfg, "window_stats.csv"), ws_csv.str());
    io::atomic_write(product(cfg, "scale_summary.csv"), sc_csv.str());
    io::atomic_write(product(cfg, "segments.csv"), io::intervals_to_csv(segments));

    ordered_json log;
    log["segments"] = segments.size();
    log["segment_seconds"] = segments.total_length();
    ordered_json per_scale = ordered_json::array();
    for (const auto& s : summaries)
        per_scale.push_back({{"scale_min", s.scale_min},
                             {"windows", s.n_windows},
                             {"frac_significant", s.frac_significant}});
    log["scales"] = per_scale;
    write_manifest(cfg, "xval", {scout_path, normalized_path, presence_path, events_path},
                   {"window_stats.csv", "scale_summary.csv", "segments.csv"}, log);
    std::cerr << "xval: " << segments.size() << " segments, " << stats.size() << " windows\n";
    return 0;
}

int cmd_report(RunConfig& cfg, const std::vector<std::string>& runs) {
    auto scout_path = require_product(cfg, "scout_clean.csv", "clean");
    auto normalized_path = require_product(cfg, "normalized.csv", "baseline");
    auto presence_path = require_product(cfg, "presence.csv", "baseline");
    auto baseline_path = require_product(cfg, "baseline.csv", "baseline");
    auto events_path = require_product(cfg, "events.csv", "detect");

    auto [scout_series, scout_classes] =
        io::classified_series_from_csv(io::read_file(scout_path), Unit::ppm);
    auto normalized = io::series_from_csv(io::read_file(normalized_path), Unit::ppm);
    auto baseline_series = io::series_from_csv(io::read_file(baseline_path), Unit::ppm);
    auto presence_ivs = io::intervals_from_csv(io::read_file(presence_path));
    std::istringstream events_in(io::read_file(events_path));
    auto all_events = read_events_csv(events_in);
    std::vector<EmissionEvent> peaks;
    for (const auto& e : all_events)
        if (e.kind == EventKind::sniffer_peak) peaks.push_back(e);

    PresenceMask mask;
    mask.flags.assign(normalized.size(), 0);
    for (std::size_t i = 0; i < normalized.size(); ++i)
        mask.flags[i] = presence_ivs.contains(normalized.time_at(i)) ? 1 : 0;

    char buf[256];
    // in-rumen signal characteristics (quantiles + saturation share)
    auto qsum = quantile_summary(scout_series, cfg.qc.saturation_ppm);
    std::string scout_csv = "n_samples,q25_ppm,q50_ppm,q75_ppm,q90_ppm,pct_saturation\n";
    std::snprintf(buf, sizeof(buf), "%zu,%.6g,%.6g,%.6g,%.6g,%.4f\n", qsum.n, qsum.q25, qsum.q50,
                  qsum.q75, qsum.q90, qsum.pct_saturation);
    scout_csv += buf;
    io::atomic_write(product(cfg, "scout_summary.csv"), scout_csv);

    // hood-sampler characteristics
    auto ssum = sniffer_summary(normalized, mask, peaks, baseline_series,
                                cfg.baseline.presence_merge_gap_s);
    std::string sniffer_csv =
        "pct_time_in_hood,events_per_day,ambient_mean_ppm,ambient_sd_ppm,"
        "ch4_median_ppm,ch4_iqr_lo_ppm,ch4_iqr_hi_ppm,peaks_per_day\n";
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n",
                  ssum.pct_time_in_hood, ssum.events_per_day, ssum.ambient_mean_ppm,
                  ssum.ambient_sd_ppm, ssum.ch4_median_ppm, ssum.ch4_iqr_lo_ppm,
                  ssum.ch4_iqr_hi_ppm, ssum.peaks_per_day);
    sniffer_csv += buf;
    io::atomic_write(product(cfg, "sniffer_summary.csv"), sniffer_csv);

    // diurnal profiles
    auto hmax = hourly_max_profile(scout_series);
    std::string hmax_csv = "hour,max_ch4_ppm,has_data\n";
    for (int h = 0; h < 24; ++h) {
        auto idx = static_cast<std::size_t>(h);
        std::snprintf(buf, sizeof(buf), "%d,%.6g,%d\n", h,
                      hmax.has_data[idx] ? hmax.value[idx] : 0.0, hmax.has_data[idx] ? 1 : 0);
        hmax_csv += buf;
    }
    io::atomic_write(product(cfg, "hourly_max.csv"), hmax_csv);

    auto hauc = hourly_auc(normalized);
    std::string hauc_csv = "hour,auc_ppm_s,has_data\n";
    for (int h = 0; h < 24; ++h) {
        auto idx = static_cast<std::size_t>(h);
        std::snprintf(buf, sizeof(buf), "%d,%.6g,%d\n", h, hauc.value[idx],
                      hauc.has_data[idx] ? 1 : 0);
        hauc_csv += buf;
    }
    io::atomic_write(product(cfg, "hourly_auc.csv"), hauc_csv);

    // cross-run factorial ANOVA: each labeled run is one diet/animal level;
    // observations are synchronized 10 s pair samples from both sensors.
    // Day enters as a fixed blocking factor.
    std::string anova_csv = "source,df,sum_of_squares,F,p\n";
    std::vector<std::string> extra_inputs;
    if (runs.size() >= 2) {
        std::vector<Observation> obs;
        int level = 0;
        long day0 = std::numeric_limits<long>::max();
        std::vector<std::tuple<int, long, int, double>> raw;  // level, day, sensor, value
        for (const auto& spec_run : runs) {
            auto eq = spec_run.find('=');
            std::string dir = eq == std::string::npos ? spec_run : spec_run.substr(eq + 1);
            auto sc_path = (fs::path(dir) / "scout_clean.csv").string();
            auto nm_path = (fs::path(dir) / "normalized.csv").string();
            if (!fs::exists(sc_path) || !fs::exists(nm_path))
                throw CliError{4, "run '" + dir + "' lacks clean/baseline products"};
            extra_inputs.push_back(sc_path);
            extra_inputs.push_back(nm_path);
            auto [sc, sc_cls] = io::classified_series_from_csv(io::read_file(sc_path), Unit::ppm);
            auto nm = io::series_from_csv(io::read_file(nm_path), Unit::ppm);
            auto pairs = align_pair(sc, nm, cfg.xval.min_valid_per_bin);
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                if (!pairs.valid[i]) continue;
                long day = static_cast<long>(std::floor(pairs.time_at(i) / 86400.0));
                day0 = std::min(day0, day);
                raw.emplace_back(level, day, 0, pairs.x[i]);
                raw.emplace_back(level, day, 1, pairs.y[i]);
            }
            ++level;
        }
        for (const auto& [lv, day, sensor, value] : raw)
            obs.push_back({lv, sensor, static_cast<int>(day - day0), value});
        auto rows = factorial_anova(obs);
        std::ostringstream anova_out;
        write_anova_csv(anova_out, rows);
        anova_csv = anova_out.str();
    }
    io::atomic_write(product(cfg, "anova.csv"), anova_csv);

    ordered_json log;
    log["anova_runs"] = runs.size();
    if (runs.size() < 2)
        log["anova_note"] = "factorial ANOVA needs >= 2 labeled runs; emitted header only";
    std::vector<std::string> inputs = {scout_path, normalized_path, presence_path, baseline_path,
                                       events_path};
    inputs.insert(inputs.end(), extra_inputs.begin(), extra_inputs.end());
    write_manifest(cfg, "report", inputs,
                   {"scout_summary.csv", "sniffer_summary.csv", "hourly_max.csv",
                    "hourly_auc.csv", "anova.csv"},
                   log);
    return 0;
}

int cmd_score(RunConfig& cfg, const std::string& truth_path) {
    std::string truth_in = truth_path.empty() ? product(cfg, "truth.json") : truth_path;
    if (!fs::exists(truth_in)) throw CliError{4, "missing " + truth_in + "; run 'scoutkit simulate' first"};
    auto truth = sim::truth_from_json(io::read_file(truth_in));

    sim::PipelineOutputs outputs;
    std::vector<EmissionEvent> drops;
    IntervalSet excluded;
    PresenceMask mask;
    Series baseline_series;
    PostureResponse posture;
    FeedingLag feeding;

    std::vector<std::string> inputs = {truth_in};
    if (fs::exists(product(cfg, "events.csv"))) {
        std::istringstream events_in(io::read_file(product(cfg, "events.csv")));
        for (const auto& e : read_events_csv(events_in))
            if (e.kind == EventKind::eructation_drop) drops.push_back(e);
        outputs.eructations = &drops;
        inputs.push_back(product(cfg, "events.csv"));
    }
    if (fs::exists(product(cfg, "exclusions.csv"))) {
        excluded = io::intervals_from_csv(io::read_file(product(cfg, "exclusions.csv")));
        outputs.excluded = &excluded;
        inputs.push_back(product(cfg, "exclusions.csv"));
    }
    if (fs::exists(product(cfg, "presence.csv")) && fs::exists(product(cfg, "normalized.csv"))) {
        auto normalized = io::series_from_csv(io::read_file(product(cfg, "normalized.csv")), Unit::ppm);
        auto ivs = io::intervals_from_csv(io::read_file(product(cfg, "presence.csv")));
        mask.flags.assign(normalized.size(), 0);
        for (std::size_t i = 0; i < normalized.size(); ++i)
            mask.flags[i] = ivs.contains(normalized.time_at(i)) ? 1 : 0;
        outputs.presence = &mask;
        outputs.presence_t0 = normalized.t0;
        outputs.presence_dt = normalized.dt;
        inputs.push_back(product(cfg, "presence.csv"));
    }
    if (fs::exists(product(cfg, "baseline.csv"))) {
        baseline_series = io::series_from_csv(io::read_file(product(cfg, "baseline.csv")), Unit::ppm);
        outputs.baseline = &baseline_series;
        inputs.push_back(product(cfg, "baseline.csv"));
    }
    if (fs::exists(product(cfg, "behavior_response.json"))) {
        auto j = nlohmann::json::parse(io::read_file(product(cfg, "behavior_response.json")));
        if (j.contains("posture")) {
            posture.n = j["posture"]["n"].get<std::size_t>();
            posture.mean_ppm = j["posture"]["mean_ppm"].get<double>();
            posture.sd_ppm = j["posture"]["sd_ppm"].get<double>();
            outputs.posture = &posture;
        }
        if (j.contains("feeding")) {
            feeding.lag_s = j["feeding"]["lag_s"].get<double>();
            feeding.confidence = j["feeding"]["confidence"].get<double>();
            feeding.inconclusive = j["feeding"]["inconclusive"].get<bool>();
            outputs.feeding = &feeding;
        }
        inputs.push_back(product(cfg, "behavior_response.json"));
    }

    auto report = sim::score_pipeline(truth, outputs);
    io::atomic_write(product(cfg, "score.json"), sim::score_to_json(report));
    write_manifest(cfg, "score", inputs, {"score.json"});
    std::cout << sim::score_to_json(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"paired in-rumen / hood-sampler methane pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // shared flags may follow the subcommand

    std::string config_path, out_dir, scales, scout_in, sniffer_in, behavior_in, truth_in;
    std::string anchors;
    long long seed = -1;
    int jobs = 0;
    std::vector<std::string> runs;

    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--out", out_dir, "output directory (default 'out')");
    app.add_option("--seed", seed, "simulator seed override");
    app.add_option("--scales", scales, "comma list of window scales in minutes");
    app.add_option("--jobs", jobs, "worker threads for the window sweep");

    auto* c_sim = app.add_subcommand("simulate", "generate a synthetic paired deployment");
    auto* c_clean = app.add_subcommand("clean", "parse, drift-correct, QC, convert, filter");
    c_clean->add_option("--scout", scout_in, "in-rumen CSV (default <out>/scout.csv)");
    c_clean->add_option("--sniffer", sniffer_in, "hood sampler CSV (default <out>/sniffer.csv)");
    c_clean->add_option("--anchors", anchors, "drift anchors 'logged:true,logged:true'");
    auto* c_base = app.add_subcommand("baseline", "presence detection and ambient correction");
    auto* c_detect = app.add_subcommand("detect", "eructation drops, peaks, behavior responses");
    c_detect->add_option("--behavior", behavior_in, "behavior CSV (default <out>/behavior.csv)");
    auto* c_xval = app.add_subcommand("xval", "scale-dependent sliding-window correlation");
    auto* c_report = app.add_subcommand("report", "summary tables and diurnal profiles");
    c_report->add_option("--run", runs, "labeled run dir LABEL=DIR for the factorial ANOVA")
        ->take_all();
    auto* c_score = app.add_subcommand("score", "score pipeline products against a truth ledger");
    c_score->add_option("--truth", truth_in, "truth ledger (default <out>/truth.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.sim.seed = static_cast<std::uint64_t>(seed);
        if (!scales.empty()) cfg.set("xval.scales_min", scales);
        if (jobs > 0) cfg.xval.jobs = jobs;
        if (!anchors.empty()) cfg.set("drift_anchors", anchors);
        cfg.events.saturation_ppm = cfg.qc.saturation_ppm;  // one ceiling everywhere
        cfg.validate();

        if (c_sim->parsed()) return cmd_simulate(cfg);
        if (c_clean->parsed()) return cmd_clean(cfg, scout_in, sniffer_in);
        if (c_base->parsed()) return cmd_baseline(cfg);
        if (c_detect->parsed()) return cmd_detect(cfg, behavior_in);
        if (c_xval->parsed()) return cmd_xval(cfg);
        if (c_report->parsed()) return cmd_report(cfg, runs);
        if (c_score->parsed()) return cmd_score(cfg, truth_in);
        return 1;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code) {
            case Errc::config: return 2;
            case Errc::schema:
            case Errc::row: return 3;
            default: return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
