#include "scout/xval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "scout/csv.hpp"
#include "scout/error.hpp"
#include "scout/mathutil.hpp"

namespace scout {

PairedSeries align_pair(const Series& scout_ppm, const Series& sniffer_ppm,
                        int min_valid_per_bin) {
    if (scout_ppm.unit != Unit::ppm || sniffer_ppm.unit != Unit::ppm)
        fail(Errc::unit, "pairing expects ppm on both platforms");
    const double dt = scout_ppm.dt;
    const Timestamp lo = std::max(scout_ppm.t0, sniffer_ppm.t0);
    const Timestamp hi = std::min(scout_ppm.end_time(), sniffer_ppm.end_time());
    if (!(lo < hi)) fail(Errc::alignment, "series time ranges do not overlap");

    const long k0 = static_cast<long>(std::ceil((lo - scout_ppm.t0) / dt - 1e-9));
    const long k1 = static_cast<long>(std::floor((hi - scout_ppm.t0) / dt + 1e-9));

    PairedSeries out;
    out.t0 = scout_ppm.time_at(static_cast<std::size_t>(std::max(0L, k0)));
    out.dt = dt;
    for (long k = std::max(0L, k0); k < k1 && k < static_cast<long>(scout_ppm.size()); ++k) {
        auto i = static_cast<std::size_t>(k);
        const Timestamp t = scout_ppm.time_at(i);
        // centered sniffer bin [t - dt/2, t + dt/2)
        double sum = 0.0;
        int n = 0;
        long j0 = static_cast<long>(std::ceil((t - dt / 2 - sniffer_ppm.t0) / sniffer_ppm.dt - 1e-9));
        long j1 = static_cast<long>(std::floor((t + dt / 2 - sniffer_ppm.t0) / sniffer_ppm.dt - 1e-9));
        for (long j = std::max(0L, j0); j <= j1 && j < static_cast<long>(sniffer_ppm.size()); ++j) {
            auto sj = static_cast<std::size_t>(j);
            if (!sniffer_ppm.is_valid(sj)) continue;
            sum += sniffer_ppm.values[sj];
            ++n;
        }
        bool pair_valid = scout_ppm.is_valid(i) && n >= min_valid_per_bin;
        out.x.push_back(pair_valid ? scout_ppm.values[i] : std::nan(""));
        out.y.push_back(pair_valid ? sum / static_cast<double>(n) : std::nan(""));
        out.valid.push_back(pair_valid ? 1 : 0);
    }
    if (out.x.empty()) fail(Errc::alignment, "no paired samples in the overlap");
    return out;
}

IntervalSet gate_events(const PairedSeries& pairs, const IntervalSet& presence,
                        const std::vector<EmissionEvent>& eructations, double min_scale_s) {
    IntervalSet segments;
    const std::size_t n = pairs.size();
    // A zero or invalid sniffer reading shorter than this does not split a
    // span as long as the animal stays present (noise around the floored
    // baseline produces brief exact zeros between pulses).
    const auto max_dropout = static_cast<std::size_t>(30.0 / pairs.dt);
    auto qualifies = [&](std::size_t k) {
        return pairs.valid[k] != 0 && pairs.y[k] > 0.0 && presence.contains(pairs.time_at(k));
    };
    std::size_t i = 0;
    while (i < n) {
        if (!qualifies(i)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n) {
            if (qualifies(j + 1)) {
                ++j;
                continue;
            }
            std::size_t k = j + 1;
            while (k < n && !qualifies(k) && presence.contains(pairs.time_at(k)) &&
                   k - j <= max_dropout)
                ++k;
            if (k < n && qualifies(k) && k - j <= max_dropout) {
                j = k;
                continue;
            }
            break;
        }
        Interval span{pairs.time_at(i), pairs.time_at(j) + pairs.dt};
        bool has_event = std::any_of(eructations.begin(), eructations.end(),
                                     [&](const EmissionEvent& e) { return span.contains(e.start); });
        if (has_event && span.length() >= min_scale_s) segments.add(span);
        i = j + 1;
    }
    return segments;
}

std::vector<double> detrend_linear(std::span<const double> x) {
    if (x.size() < 3) fail(Errc::insufficient, "detrending needs n >= 3");
    std::vector<double> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0.0);
    auto fit = num::ols_line(idx, x);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] - (fit.intercept + fit.slope * static_cast<double>(i));
    return out;
}

SignedR signed_r(std::span<const double> x, std::span<const double> y) {
    SignedR out;
    if (x.size() < 3 || y.size() != x.size()) return out;
    auto fit = num::ols_line(x, y);
    if (!fit.defined) return out;
    out.slope = fit.slope;
    out.value = std::copysign(std::sqrt(std::max(0.0, fit.r2)), fit.slope);
    out.defined = true;
    return out;
}

Ar1Result ar1_neff(std::span<const double> x, std::span<const double> y) {
    Ar1Result out;
    out.rho_x1 = num::lag1_autocorr(x);
    out.rho_y1 = num::lag1_autocorr(y);
    const double n = static_cast<double>(x.size());
    const double prod = out.rho_x1 * out.rho_y1;
    double neff = n;
    if (1.0 + prod > 0.0) neff = n * (1.0 - prod) / (1.0 + prod);
    out.n_eff = std::clamp(neff, 3.0, n);
    return out;
}

double p_from_r(double r, double n_eff) {
    if (n_eff < 3.0) fail(Errc::data, "p_from_r needs n_eff >= 3");
    if (std::fabs(r) >= 1.0) return 0.0;
    double t = r * std::sqrt((n_eff - 2.0) / (1.0 - r * r));
    return num::t_sf_two_sided(t, n_eff - 2.0);
}

std::vector<double> bh_fdr(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) fail(Errc::data, "p-values must lie in [0, 1]");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> q(m, 0.0);
    double running = 1.0;
    for (std::size_t rank = m; rank-- > 0;) {
        double adj = p_values[order[rank]] * static_cast<double>(m) /
                     static_cast<double>(rank + 1);
        running = std::min(running, adj);
        q[order[rank]] = running;
    }
    return q;
}

std::size_t window_count_closed_form(std::size_t seg_len, std::size_t scale_len,
                                     std::size_t step) {
    if (seg_len < scale_len || step == 0) return 0;
    return (seg_len - scale_len) / step + 1;
}

namespace {

std::vector<WindowStat> sweep_one_scale(const PairedSeries& pairs,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& segs,
                                        int scale_min, const XvalConfig& cfg) {
    std::vector<WindowStat> out;
    const auto win_len = static_cast<std::size_t>(
        std::lround(static_cast<double>(scale_min) * 60.0 / pairs.dt));
    const auto step = static_cast<std::size_t>(std::lround(cfg.step_s / pairs.dt));
    if (win_len < 3 || step == 0) return out;

    for (auto [lo, len] : segs) {
        if (len < win_len) continue;
        for (std::size_t w = 0; w + win_len <= len; w += step) {
            const std::size_t base = lo + w;
            std::vector<double> x, y;
            x.reserve(win_len);
            y.reserve(win_len);
            for (std::size_t k = 0; k < win_len; ++k) {
                if (!pairs.valid[base + k]) continue;
                x.push_back(pairs.x[base + k]);
                y.push_back(pairs.y[base + k]);
            }
            if (static_cast<double>(x.size()) <
                cfg.min_valid_frac * static_cast<double>(win_len))
                continue;
            if (x.size() < 10) continue;  // ar1_neff needs a usable window

            WindowStat st;
            st.window_start = pairs.time_at(base);
            st.scale_min = scale_min;
            st.n = x.size();
            st.r_pearson = num::pearson(x, y);
            auto xd = detrend_linear(x);
            auto yd = detrend_linear(y);
            st.r_detrended = num::pearson(xd, yd);
            auto sr = signed_r(x, y);
            st.signed_R = sr.value;
            st.slope = sr.slope;
            auto ar = ar1_neff(xd, yd);
            st.rho_x1 = ar.rho_x1;
            st.rho_y1 = ar.rho_y1;
            st.n_eff = ar.n_eff;
            if (!std::isfinite(st.r_pearson) || !std::isfinite(st.r_detrended) || !sr.defined)
                continue;  // degenerate (constant) window
            st.p_raw = p_from_r(st.r_detrended, static_cast<double>(st.n));
            st.p_eff = p_from_r(st.r_detrended, st.n_eff);
            out.push_back(st);
        }
    }

    // BH-FDR across this scale's windows
    std::vector<double> ps;
    ps.reserve(out.size());
    for (const auto& st : out) ps.push_back(st.p_eff);
    auto qs = bh_fdr(ps);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].q = qs[i];
    return out;
}

}  // namespace

std::vector<WindowStat> window_sweep(const PairedSeries& pairs, const IntervalSet& segments,
                                     const XvalConfig& cfg) {
    if (segments.empty()) fail(Errc::insufficient, "no analysis segments");

    // segment index ranges on the pair grid
    std::vector<std::pair<std::size_t, std::size_t>> segs;  // (first index, length)
    for (const auto& iv : segments) {
        long a = static_cast<long>(std::ceil((iv.start - pairs.t0) / pairs.dt - 1e-9));
        long b = static_cast<long>(std::floor((iv.end - pairs.t0) / pairs.dt + 1e-9));
        a = std::max(a, 0L);
        b = std::min(b, static_cast<long>(pairs.size()));
        if (b > a) segs.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b - a));
    }

    std::vector<std::vector<WindowStat>> per_scale(cfg.scales_min.size());
    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        for (std::size_t s = 0; s < cfg.scales_min.size(); ++s)
            per_scale[s] = sweep_one_scale(pairs, segs, cfg.scales_min[s], cfg);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mu;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t s;
                    {
                        std::lock_guard lock(mu);
                        if (next >= cfg.scales_min.size()) return;
                        s = next++;
                    }
                    per_scale[s] = sweep_one_scale(pairs, segs, cfg.scales_min[s], cfg);
                }
            });
        for (auto& th : pool) th.join();
    }

    std::vector<WindowStat> out;
    for (auto& block : per_scale)
        out.insert(out.end(), block.begin(), block.end());
    return out;
}

std::vector<ScaleSummary> scale_summary(const std::vector<WindowStat>& stats,
                                        double q_threshold) {
    if (stats.empty()) fail(Errc::insufficient, "no window statistics to summarize");
    std::vector<int> scales;
    for (const auto& st : stats)
        if (std::find(scales.begin(), scales.end(), st.scale_min) == scales.end())
            scales.push_back(st.scale_min);
    std::sort(scales.begin(), scales.end());

    std::vector<ScaleSummary> out;
    for (int sc : scales) {
        std::vector<double> r, rd, sr;
        std::size_t sig = 0, n = 0;
        for (const auto& st : stats) {
            if (st.scale_min != sc) continue;
            r.push_back(st.r_pearson);
            rd.push_back(st.r_detrended);
            sr.push_back(st.signed_R);
            sig += (st.q < q_threshold);
            ++n;
        }
        ScaleSummary s;
        s.scale_min = sc;
        s.n_windows = n;
        s.mean_r = num::mean(r);
        s.sd_r = num::sample_sd(r);
        s.mean_r_detrended = num::mean(rd);
        s.sd_r_detrended = num::sample_sd(rd);
        s.mean_signed_R = num::mean(sr);
        s.sd_signed_R = num::sample_sd(sr);
        s.frac_significant = n > 0 ? static_cast<double>(sig) / static_cast<double>(n) : 0.0;
        out.push_back(s);
    }
    return out;
}

void write_window_stats_csv(std::ostream& out, const std::vector<WindowStat>& stats) {
    out << "scale_min,window_start,n,n_eff,r_pearson,r_detrended,signed_R,slope,"
           "rho_x1,rho_y1,p_raw,p_eff,q\n";
    for (const auto& st : stats) {
        char buf[320];
        std::snprintf(buf, sizeof(buf),
                      "%d,%s,%zu,%.6g,%.8g,%.8g,%.8g,%.8g,%.6g,%.6g,%.8g,%.8g,%.8g\n",
                      st.scale_min, format_timestamp(st.window_start).c_str(), st.n, st.n_eff,
                      st.r_pearson, st.r_detrended, st.signed_R, st.slope, st.rho_x1, st.rho_y1,
                      st.p_raw, st.p_eff, st.q);
        out << buf;
    }
}

void write_scale_summary_csv(std::ostream& out, const std::vector<ScaleSummary>& summaries) {
    out << "scale_min,n_windows,mean_r,sd_r,mean_r_detrended,sd_r_detrended,"
           "mean_signed_R,sd_signed_R,frac_significant\n";
    for (const auto& s : summaries) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%d,%zu,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.6g\n",
                      s.scale_min, s.n_windows, s.mean_r, s.sd_r, s.mean_r_detrended,
                      s.sd_r_detrended, s.mean_signed_R, s.sd_signed_R, s.frac_significant);
        out << buf;
    }
}

}  // namespace scout
