#include "scout/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scout/error.hpp"
#include "scout/mathutil.hpp"

namespace scout {

std::size_t PresenceMask::flagged_count() const {
    std::size_t n = 0;
    for (auto f : flags) n += (f != 0);
    return n;
}

namespace {

long utc_day(Timestamp t) { return static_cast<long>(std::floor(t / 86400.0)); }

// Fills skipped samples (mask true) by linear interpolation between the
// nearest kept neighbours; extends flat at the ends. Returns false if no
// sample was kept at all.
bool bridge_skipped(const Series& s, const std::vector<std::uint8_t>& keep,
                    std::vector<double>* out) {
    const std::size_t n = s.size();
    out->assign(n, 0.0);
    long prev = -1;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        any = true;
        double v = s.values[i];
        (*out)[i] = v;
        if (prev < 0) {
            for (std::size_t j = 0; j < i; ++j) (*out)[j] = v;  // flat head
        } else if (static_cast<std::size_t>(prev) + 1 < i) {
            double pv = (*out)[static_cast<std::size_t>(prev)];
            double span = static_cast<double>(i - static_cast<std::size_t>(prev));
            for (std::size_t j = static_cast<std::size_t>(prev) + 1; j < i; ++j)
                (*out)[j] = pv + (v - pv) * static_cast<double>(j - prev) / span;
        }
        prev = static_cast<long>(i);
    }
    if (!any) return false;
    for (std::size_t j = static_cast<std::size_t>(prev) + 1; j < n; ++j)
        (*out)[j] = (*out)[static_cast<std::size_t>(prev)];  // flat tail
    return true;
}

// Centered moving average with truncated windows at the edges; input is a
// fully-defined vector (bridged beforehand).
std::vector<double> centered_mean(const std::vector<double>& x, int window) {
    const long n = static_cast<long>(x.size());
    const long h = std::max(1, window) / 2;
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (long i = 0; i < n; ++i)
        prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(i)];
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (long i = 0; i < n; ++i) {
        long lo = std::max(0L, i - h);
        long hi = std::min(n - 1, i + h);
        out[static_cast<std::size_t>(i)] =
            (prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)]) /
            static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace

PresenceResult detect_presence_stage1(const Series& co2_ppm, const BaselineConfig& cfg) {
    if (co2_ppm.unit != Unit::ppm) fail(Errc::unit, "presence detection expects ppm");
    const std::size_t n = co2_ppm.size();
    PresenceResult res;
    res.mask.flags.assign(n, 0);

    // daily medians over valid samples of each UTC day
    std::map<long, std::vector<double>> per_day;
    for (std::size_t i = 0; i < n; ++i)
        if (co2_ppm.is_valid(i)) per_day[utc_day(co2_ppm.time_at(i))].push_back(co2_ppm.values[i]);
    std::map<long, double> day_median;
    for (auto& [day, vals] : per_day) day_median[day] = num::median(std::move(vals));

    long prev_valid = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!co2_ppm.is_valid(i)) continue;
        const double v = co2_ppm.values[i];
        auto it = day_median.find(utc_day(co2_ppm.time_at(i)));
        bool flag = false;
        if (it != day_median.end() && v - it->second > cfg.stage1_abs_ppm) flag = true;
        if (prev_valid >= 0 && static_cast<std::size_t>(prev_valid) + 1 == i &&
            std::fabs(v - co2_ppm.values[static_cast<std::size_t>(prev_valid)]) >
                cfg.stage1_diff_ppm)
            flag = true;
        if (flag) res.mask.flags[i] = 1;
        prev_valid = static_cast<long>(i);
    }

    // count fully-invalid days inside the span
    long first_day = utc_day(co2_ppm.t0);
    long last_day = utc_day(co2_ppm.time_at(n ? n - 1 : 0));
    for (long d = first_day; d <= last_day; ++d)
        if (!day_median.count(d)) ++res.empty_days;
    return res;
}

PresenceResult refine_presence_stage2(const Series& co2_ppm, const PresenceMask& stage1,
                                      const BaselineConfig& cfg) {
    const std::size_t n = co2_ppm.size();
    if (stage1.size() != n) fail(Errc::alignment, "stage-1 mask length mismatch");
    PresenceResult res;
    res.mask = stage1;

    std::vector<std::uint8_t> keep(n, 0);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
        keep[i] = co2_ppm.is_valid(i) && !stage1.is_flagged(i);
        kept += keep[i];
    }

    std::vector<double> smoothed;
    if (kept >= static_cast<std::size_t>(cfg.co2_smooth_window)) {
        std::vector<double> bridged;
        bridge_skipped(co2_ppm, keep, &bridged);
        smoothed = centered_mean(bridged, cfg.co2_smooth_window);
    } else {
        // too few unflagged samples to smooth: screen against a global median
        res.window_fallback = true;
        std::vector<double> vals;
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i]) vals.push_back(co2_ppm.values[i]);
        double med = vals.empty() ? 0.0 : num::median(std::move(vals));
        smoothed.assign(n, med);
    }

    long prev_valid = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!co2_ppm.is_valid(i)) continue;
        const double v = co2_ppm.values[i];
        if (v - smoothed[i] > cfg.stage2_abs_ppm) res.mask.flags[i] = 1;
        if (prev_valid >= 0 && static_cast<std::size_t>(prev_valid) + 1 == i &&
            std::fabs(v - co2_ppm.values[static_cast<std::size_t>(prev_valid)]) >
                cfg.stage2_diff_ppm)
            res.mask.flags[i] = 1;
        prev_valid = static_cast<long>(i);
    }
    return res;
}

BaselineResult ambient_baseline(const Series& ch4_ppm, const PresenceMask& presence,
                                const BaselineConfig& cfg) {
    const std::size_t n = ch4_ppm.size();
    if (presence.size() != n) fail(Errc::alignment, "presence mask length mismatch");
    if (n == 0) fail(Errc::insufficient, "cannot baseline an empty series");

    std::vector<std::uint8_t> absence(n, 0);
    std::map<long, std::pair<std::size_t, std::size_t>> day_counts;  // absence, total
    for (std::size_t i = 0; i < n; ++i) {
        absence[i] = ch4_ppm.is_valid(i) && !presence.is_flagged(i);
        auto& [abs_cnt, tot] = day_counts[utc_day(ch4_ppm.time_at(i))];
        abs_cnt += absence[i];
        ++tot;
    }

    std::vector<double> bridged;
    if (!bridge_skipped(ch4_ppm, absence, &bridged))
        fail(Errc::insufficient, "no absence samples to estimate the ambient baseline");
    auto smoothed = centered_mean(bridged, cfg.ch4_smooth_window);

    BaselineResult res;
    res.baseline = Series::uniform(ch4_ppm.t0, ch4_ppm.dt, n, Unit::ppm);
    for (std::size_t i = 0; i < n; ++i) res.baseline.set(i, smoothed[i]);
    for (const auto& [day, counts] : day_counts)
        if (static_cast<double>(counts.first) <
            cfg.min_absence_frac * static_cast<double>(counts.second))
            res.low_confidence_days.push_back(day);
    return res;
}

Series normalize(const Series& ch4_ppm, const Series& baseline) {
    if (ch4_ppm.size() != baseline.size() || ch4_ppm.t0 != baseline.t0 ||
        ch4_ppm.dt != baseline.dt)
        fail(Errc::alignment, "normalize: series grids do not match");
    Series out = Series::uniform(ch4_ppm.t0, ch4_ppm.dt, ch4_ppm.size(), Unit::ppm);
    for (std::size_t i = 0; i < ch4_ppm.size(); ++i) {
        if (!ch4_ppm.is_valid(i) || !baseline.is_valid(i)) continue;
        out.set(i, std::max(0.0, ch4_ppm.values[i] - baseline.values[i]));
    }
    return out;
}

IntervalSet presence_intervals(const PresenceMask& mask, Timestamp t0, double dt,
                               double merge_gap_s) {
    IntervalSet out;
    const std::size_t n = mask.size();
    std::size_t i = 0;
    while (i < n) {
        if (!mask.is_flagged(i)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && mask.is_flagged(j + 1)) ++j;
        Interval iv{t0 + dt * static_cast<double>(i), t0 + dt * static_cast<double>(j + 1)};
        // absorb the previous gap if it is shorter than the merge threshold
        if (!out.empty() && iv.start - out[out.size() - 1].end < merge_gap_s) {
            Interval merged{out[out.size() - 1].start, iv.end};
            out.add(merged);
        } else {
            out.add(iv);
        }
        i = j + 1;
    }
    return out;
}

PresenceStats presence_stats(const PresenceMask& mask, Timestamp t0, double dt,
                             double merge_gap_s) {
    if (mask.size() == 0) fail(Errc::insufficient, "empty presence mask");
    PresenceStats st;
    auto events = presence_intervals(mask, t0, dt, merge_gap_s);
    st.events = events.size();
    st.pct_time =
        100.0 * static_cast<double>(mask.flagged_count()) / static_cast<double>(mask.size());
    double span_days = dt * static_cast<double>(mask.size()) / 86400.0;
    st.events_per_day = span_days > 0.0 ? static_cast<double>(st.events) / span_days : 0.0;
    st.mean_event_duration_s =
        st.events > 0 ? events.total_length() / static_cast<double>(st.events) : 0.0;
    return st;
}

}  // namespace scout
