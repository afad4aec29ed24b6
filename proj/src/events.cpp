#include "scout/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "scout/csv.hpp"
#include "scout/error.hpp"
#include "scout/mathutil.hpp"

namespace scout {

const char* event_kind_name(EventKind k) {
    return k == EventKind::eructation_drop ? "eructation_drop" : "sniffer_peak";
}

namespace {

// Maximal valid runs as [first, last] index pairs.
std::vector<std::pair<std::size_t, std::size_t>> valid_runs(const Series& s) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!s.is_valid(i)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < s.size() && s.is_valid(j + 1)) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    return runs;
}

}  // namespace

std::vector<EmissionEvent> detect_eructations(const Series& scout_ppm, const EventConfig& cfg) {
    if (scout_ppm.unit != Unit::ppm) fail(Errc::unit, "eructation detection expects ppm");
    std::vector<EmissionEvent> events;
    const auto max_steps = static_cast<std::size_t>(
        std::max(0.0, std::floor(cfg.drop_max_span_s / scout_ppm.dt + 1e-9)));

    for (auto [lo, hi] : valid_runs(scout_ppm)) {
        std::size_t i = lo;
        while (i < hi) {
            // maximal non-increasing run starting at i
            if (!(scout_ppm.values[i + 1] <= scout_ppm.values[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 <= hi && scout_ppm.values[j + 1] <= scout_ppm.values[j]) ++j;

            // qualifying windows [a, k] with k - a <= max_steps and enough
            // decrease; overlapping windows fuse into one event
            long ev_start = -1, ev_end = -1;
            for (std::size_t k = i + 1; k <= j; ++k) {
                std::size_t a = (k - i) > max_steps ? k - max_steps : i;
                if (scout_ppm.values[a] - scout_ppm.values[k] < cfg.drop_min_ppm) continue;
                if (ev_end >= 0 && static_cast<long>(a) <= ev_end) {
                    ev_end = static_cast<long>(k);
                } else {
                    if (ev_start >= 0) {
                        auto s = static_cast<std::size_t>(ev_start);
                        auto e = static_cast<std::size_t>(ev_end);
                        events.push_back({EventKind::eructation_drop, scout_ppm.time_at(s),
                                          scout_ppm.time_at(e),
                                          scout_ppm.values[s] - scout_ppm.values[e]});
                    }
                    ev_start = static_cast<long>(a);
                    ev_end = static_cast<long>(k);
                }
            }
            if (ev_start >= 0) {
                auto s = static_cast<std::size_t>(ev_start);
                auto e = static_cast<std::size_t>(ev_end);
                events.push_back({EventKind::eructation_drop, scout_ppm.time_at(s),
                                  scout_ppm.time_at(e),
                                  scout_ppm.values[s] - scout_ppm.values[e]});
            }
            i = j;
        }
    }
    return events;
}

std::vector<EmissionEvent> detect_peaks(const Series& normalized_ppm, const EventConfig& cfg) {
    if (normalized_ppm.unit != Unit::ppm) fail(Errc::unit, "peak detection expects ppm");
    const auto& v = normalized_ppm.values;

    struct Candidate {
        std::size_t idx;
        double prominence;
    };
    std::vector<Candidate> cands;
    for (auto [lo, hi] : valid_runs(normalized_ppm)) {
        for (std::size_t i = lo + 1; i < hi; ++i) {
            if (!(v[i] > v[i - 1])) continue;
            std::size_t plateau_end = i;
            while (plateau_end + 1 <= hi && v[plateau_end + 1] == v[i]) ++plateau_end;
            if (plateau_end >= hi || !(v[plateau_end + 1] < v[i])) continue;

            // topographic prominence: walk each side until a higher sample or
            // the run edge, tracking the minimum; base = the higher minimum
            double left_min = v[i];
            for (std::size_t k = i; k-- > lo;) {
                if (v[k] > v[i]) break;
                left_min = std::min(left_min, v[k]);
            }
            double right_min = v[i];
            for (std::size_t k = plateau_end + 1; k <= hi; ++k) {
                if (v[k] > v[i]) break;
                right_min = std::min(right_min, v[k]);
            }
            double prom = v[i] - std::max(left_min, right_min);
            if (prom >= cfg.peak_min_prominence_ppm) cands.push_back({i, prom});
            i = plateau_end;
        }
    }

    // enforce pairwise separation, keeping the more prominent peak
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.prominence > b.prominence;
    });
    std::vector<Candidate> kept;
    for (const auto& c : cands) {
        bool ok = true;
        for (const auto& k : kept) {
            double sep = std::fabs(normalized_ppm.time_at(c.idx) - normalized_ppm.time_at(k.idx));
            if (sep < cfg.peak_min_separation_s) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end(),
              [](const Candidate& a, const Candidate& b) { return a.idx < b.idx; });

    std::vector<EmissionEvent> events;
    for (const auto& c : kept)
        events.push_back({EventKind::sniffer_peak, normalized_ppm.time_at(c.idx),
                          normalized_ppm.time_at(c.idx) + normalized_ppm.dt, c.prominence});
    return events;
}

namespace {

struct WindowAgg {
    double mean = 0.0;
    double max = -std::numeric_limits<double>::infinity();
    Timestamp max_t = 0.0;
    std::size_t n = 0;
};

WindowAgg aggregate(const Series& s, Timestamp lo, Timestamp hi) {
    WindowAgg agg;
    double sum = 0.0;
    long k0 = static_cast<long>(std::ceil((lo - s.t0) / s.dt - 1e-9));
    long k1 = static_cast<long>(std::floor((hi - s.t0) / s.dt + 1e-9));
    for (long k = std::max(0L, k0); k <= k1 && k < static_cast<long>(s.size()); ++k) {
        auto i = static_cast<std::size_t>(k);
        if (!s.is_valid(i)) continue;
        sum += s.values[i];
        ++agg.n;
        if (s.values[i] > agg.max) {
            agg.max = s.values[i];
            agg.max_t = s.time_at(i);
        }
    }
    if (agg.n > 0) agg.mean = sum / static_cast<double>(agg.n);
    return agg;
}

}  // namespace

PostureResponse posture_response(const Series& scout_ppm,
                                 const std::vector<BehaviorInterval>& behavior,
                                 const EventConfig& cfg) {
    PostureResponse res;
    std::vector<double> responses, latencies;
    const double w = cfg.posture_window_s;
    for (const auto& iv : behavior) {
        if (iv.label != BehaviorLabel::sitting && iv.label != BehaviorLabel::standing) continue;
        const Timestamp t = iv.start;
        if (t - w < scout_ppm.t0 || t + w > scout_ppm.end_time()) {
            ++res.skipped;
            continue;
        }
        auto pre = aggregate(scout_ppm, t - w, t - scout_ppm.dt);
        auto post = aggregate(scout_ppm, t, t + w);
        if (pre.n == 0 || post.n == 0) {
            ++res.skipped;
            continue;
        }
        if (post.max >= cfg.saturation_ppm) ++res.censored;
        responses.push_back(post.max - pre.mean);
        latencies.push_back(post.max_t - t);
    }
    res.n = responses.size();
    if (res.n > 0) {
        res.mean_ppm = num::mean(responses);
        res.sd_ppm = num::sample_sd(responses);
        res.mean_latency_s = num::mean(latencies);
        res.sd_latency_s = num::sample_sd(latencies);
    }
    return res;
}

FeedingLag feeding_lag(const Series& scout_ppm, const std::vector<Timestamp>& feeding_starts,
                       const EventConfig& cfg) {
    if (feeding_starts.size() < 3) fail(Errc::data, "feeding-lag estimation needs >= 3 events");
    const double dt = scout_ppm.dt;
    const long k_lo = static_cast<long>(std::ceil(cfg.feeding_lag_lo_s / dt - 1e-9));
    const long k_hi = static_cast<long>(std::floor(cfg.feeding_lag_hi_s / dt + 1e-9));
    if (k_hi < k_lo) fail(Errc::config, "feeding-lag band is empty");

    const std::size_t nk = static_cast<std::size_t>(k_hi - k_lo + 1);
    std::vector<double> pooled(nk, 0.0);
    std::vector<std::size_t> counts(nk, 0);
    std::vector<double> event_argmax;

    FeedingLag out;
    out.n_events = feeding_starts.size();
    for (Timestamp te : feeding_starts) {
        auto base = aggregate(scout_ppm, te - 300.0, te);
        if (base.n == 0) continue;
        double best = -std::numeric_limits<double>::infinity();
        long best_k = -1;
        for (long k = k_lo; k <= k_hi; ++k) {
            long idx = scout_ppm.index_of(te + static_cast<double>(k) * dt);
            if (idx < 0 || idx >= static_cast<long>(scout_ppm.size())) continue;
            auto i = static_cast<std::size_t>(idx);
            if (!scout_ppm.is_valid(i)) continue;
            double rise = scout_ppm.values[i] - base.mean;
            auto slot = static_cast<std::size_t>(k - k_lo);
            pooled[slot] += rise;
            ++counts[slot];
            if (rise > best) {
                best = rise;
                best_k = k;
            }
        }
        if (best_k >= 0) event_argmax.push_back(static_cast<double>(best_k) * dt);
    }

    double best = -std::numeric_limits<double>::infinity();
    long best_k = k_lo;
    for (std::size_t s = 0; s < nk; ++s) {
        if (counts[s] == 0) continue;
        double v = pooled[s] / static_cast<double>(counts[s]);
        if (v > best) {
            best = v;
            best_k = k_lo + static_cast<long>(s);
        }
    }
    if (!std::isfinite(best)) fail(Errc::insufficient, "no valid samples inside the lag band");

    out.lag_s = static_cast<double>(best_k) * dt;
    std::size_t hits = 0;
    for (double a : event_argmax)
        if (std::fabs(a - out.lag_s) <= 300.0) ++hits;
    out.confidence =
        event_argmax.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(event_argmax.size());
    out.inconclusive = out.confidence < 0.5;
    return out;
}

void write_events_csv(std::ostream& out, const std::vector<EmissionEvent>& events) {
    out << "kind,start,end,magnitude_ppm\n";
    for (const auto& e : events) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", e.magnitude_ppm);
        out << event_kind_name(e.kind) << ',' << format_timestamp(e.start) << ','
            << format_timestamp(e.end) << ',' << buf << '\n';
    }
}

std::vector<EmissionEvent> read_events_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(Errc::schema, "empty events file");
    std::vector<EmissionEvent> events;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string kind, start, end, mag;
        if (!std::getline(row, kind, ',') || !std::getline(row, start, ',') ||
            !std::getline(row, end, ',') || !std::getline(row, mag))
            fail(Errc::row, "malformed event row", line_no);
        EmissionEvent e;
        e.kind = kind == "sniffer_peak" ? EventKind::sniffer_peak : EventKind::eructation_drop;
        e.start = parse_timestamp(start);
        e.end = parse_timestamp(end);
        e.magnitude_ppm = std::stod(mag);
        events.push_back(e);
    }
    return events;
}

}  // namespace scout
