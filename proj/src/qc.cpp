#include "scout/qc.hpp"

#include <cmath>

#include "scout/error.hpp"
#include "scout/mathutil.hpp"

namespace scout {

const char* sample_class_name(SampleClass c) {
    switch (c) {
        case SampleClass::valid: return "valid";
        case SampleClass::missing: return "missing";
        case SampleClass::warmup: return "warmup";
        case SampleClass::saturated: return "saturated";
        case SampleClass::low: return "low";
        case SampleClass::drop_event: return "drop_event";
        case SampleClass::excluded_artifact: return "excluded_artifact";
        case SampleClass::excluded_flow: return "excluded_flow";
    }
    return "missing";
}

std::optional<SampleClass> sample_class_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kSampleClassCount; ++i) {
        auto c = static_cast<SampleClass>(i);
        if (name == sample_class_name(c)) return c;
    }
    return std::nullopt;
}

Series strip_initialization(const Series& s, const QCConfig& cfg) {
    if (s.empty()) fail(Errc::insufficient, "cannot strip an empty series");
    Series out = s;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.time_at(i) - out.t0 < cfg.warmup_s) {
            out.set_invalid(i);
        } else {
            break;  // uniform grid: once past the window, stay past it
        }
    }
    return out;
}

std::vector<SampleClass> classify_scout(const Series& s, const QCConfig& cfg,
                                        const IntervalSet& drops) {
    if (s.unit != Unit::ppm) fail(Errc::unit, "scout classification expects ppm");
    std::vector<SampleClass> cls(s.size(), SampleClass::missing);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Timestamp t = s.time_at(i);
        if (!s.is_valid(i)) {
            cls[i] = (t - s.t0 < cfg.warmup_s) ? SampleClass::warmup : SampleClass::missing;
            continue;
        }
        const double v = s.values[i];
        if (v >= cfg.saturation_ppm) {
            cls[i] = SampleClass::saturated;
        } else if (drops.contains(t)) {
            cls[i] = SampleClass::drop_event;
        } else if (v < cfg.low_ppm) {
            cls[i] = SampleClass::low;
        } else {
            cls[i] = SampleClass::valid;
        }
    }
    return cls;
}

IntervalSet detect_pump_resets(const Series& flow, const QCConfig& cfg) {
    if (flow.unit != Unit::l_min) fail(Errc::unit, "pump-reset detection expects L/min");
    IntervalSet events;
    std::size_t i = 0;
    const std::size_t n = flow.size();
    while (i < n) {
        if (flow.is_valid(i) && flow.values[i] < cfg.min_flow_l_min) {
            std::size_t j = i;
            while (j + 1 < n && flow.is_valid(j + 1) && flow.values[j + 1] < cfg.min_flow_l_min)
                ++j;
            events.add({flow.time_at(i), flow.time_at(j) + flow.dt});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return events;
}

ExclusionResult apply_exclusions(const Series& s, const IntervalSet& events, const Series& flow,
                                 const QCConfig& cfg) {
    ExclusionResult out;
    out.series = s;
    out.classes.assign(s.size(), SampleClass::valid);
    out.padded_events = events.padded(cfg.pre_exclusion_s, cfg.post_exclusion_s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Timestamp t = s.time_at(i);
        if (!s.is_valid(i)) {
            out.classes[i] = SampleClass::missing;
            continue;
        }
        if (out.padded_events.contains(t)) {
            out.series.set_invalid(i);
            out.classes[i] = SampleClass::excluded_artifact;
            continue;
        }
        long fk = flow.index_of(t);
        bool flow_known = fk >= 0 && static_cast<std::size_t>(fk) < flow.size() &&
                          flow.is_valid(static_cast<std::size_t>(fk));
        if (flow_known && flow.values[static_cast<std::size_t>(fk)] < cfg.min_flow_l_min) {
            out.series.set_invalid(i);
            out.classes[i] = SampleClass::excluded_flow;
        }
    }
    return out;
}

AmbientCheck ambient_zero_check(const Series& ambient_ppm, const QCConfig& cfg) {
    if (ambient_ppm.unit != Unit::ppm) fail(Errc::unit, "ambient check expects ppm");
    std::vector<double> vals;
    vals.reserve(ambient_ppm.size());
    for (std::size_t i = 0; i < ambient_ppm.size(); ++i)
        if (ambient_ppm.is_valid(i)) vals.push_back(ambient_ppm.values[i]);
    if (vals.empty()) fail(Errc::insufficient, "ambient segment has no valid samples");
    AmbientCheck chk;
    chk.median_ppm = num::median(std::move(vals));
    chk.pass = chk.median_ppm >= cfg.ambient_low_ppm && chk.median_ppm <= cfg.ambient_high_ppm;
    return chk;
}

DriftCheck weekly_drift_check(const std::vector<std::pair<Timestamp, double>>& baselines,
                              const QCConfig& cfg) {
    if (baselines.size() < 2) fail(Errc::insufficient, "drift check needs >= 2 baseline points");
    double span = baselines.back().first - baselines.front().first;
    if (span < 86400.0) fail(Errc::insufficient, "drift check needs >= 24 h of baselines");
    std::vector<double> t, v;
    t.reserve(baselines.size());
    v.reserve(baselines.size());
    for (const auto& [ts, ppm] : baselines) {
        t.push_back(ts);
        v.push_back(ppm);
    }
    auto fit = num::ols_line(t, v);
    double base = num::mean(v);
    DriftCheck chk;
    chk.weekly_frac = base != 0.0 ? std::fabs(fit.slope) * 604800.0 / base : 0.0;
    chk.pass = chk.weekly_frac <= cfg.max_weekly_drift_frac;
    return chk;
}

QCReport retention_report(const std::vector<SampleClass>& classes) {
    if (classes.empty()) fail(Errc::insufficient, "empty classification");
    QCReport rep;
    rep.total = classes.size();
    for (auto c : classes) ++rep.counts[static_cast<std::size_t>(c)];
    const double non_missing =
        static_cast<double>(rep.total - rep.count(SampleClass::missing));
    if (non_missing <= 0.0) return rep;  // stays undefined-flagged
    rep.defined = true;
    rep.retention_frac = static_cast<double>(rep.count(SampleClass::valid) +
                                             rep.count(SampleClass::saturated) +
                                             rep.count(SampleClass::drop_event)) /
                         non_missing;
    rep.saturation_frac = static_cast<double>(rep.count(SampleClass::saturated)) / non_missing;
    rep.low_frac = static_cast<double>(rep.count(SampleClass::low)) / non_missing;
    rep.drop_frac = static_cast<double>(rep.count(SampleClass::drop_event)) / non_missing;
    return rep;
}

}  // namespace scout
