#include "scout/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "scout/error.hpp"
#include "scout/mathutil.hpp"

namespace scout {

QuantileSummary quantile_summary(const Series& scout_ppm, double saturation_ppm) {
    if (scout_ppm.unit != Unit::ppm) fail(Errc::unit, "quantile summary expects ppm");
    std::vector<double> vals;
    vals.reserve(scout_ppm.size());
    std::size_t saturated = 0;
    for (std::size_t i = 0; i < scout_ppm.size(); ++i) {
        if (!scout_ppm.is_valid(i)) continue;
        vals.push_back(scout_ppm.values[i]);
        saturated += (scout_ppm.values[i] >= saturation_ppm);
    }
    if (vals.empty()) fail(Errc::insufficient, "no valid samples to summarize");
    std::sort(vals.begin(), vals.end());
    QuantileSummary qs;
    qs.n = vals.size();
    qs.q25 = num::quantile_sorted(vals, 0.25);
    qs.q50 = num::quantile_sorted(vals, 0.50);
    qs.q75 = num::quantile_sorted(vals, 0.75);
    qs.q90 = num::quantile_sorted(vals, 0.90);
    qs.pct_saturation = 100.0 * static_cast<double>(saturated) / static_cast<double>(qs.n);
    return qs;
}

namespace {

long utc_day(Timestamp t) { return static_cast<long>(std::floor(t / 86400.0)); }
int utc_hour(Timestamp t) {
    double sod = t - std::floor(t / 86400.0) * 86400.0;
    return static_cast<int>(sod / 3600.0) % 24;
}

}  // namespace

HourlyProfile hourly_max_profile(const Series& s) {
    std::map<std::pair<long, int>, double> day_hour_max;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.is_valid(i)) continue;
        auto key = std::make_pair(utc_day(s.time_at(i)), utc_hour(s.time_at(i)));
        auto [it, fresh] = day_hour_max.try_emplace(key, s.values[i]);
        if (!fresh) it->second = std::max(it->second, s.values[i]);
    }
    HourlyProfile prof;
    std::array<double, 24> sums{};
    std::array<std::size_t, 24> counts{};
    for (const auto& [key, vmax] : day_hour_max) {
        sums[static_cast<std::size_t>(key.second)] += vmax;
        ++counts[static_cast<std::size_t>(key.second)];
    }
    for (int h = 0; h < 24; ++h) {
        auto idx = static_cast<std::size_t>(h);
        if (counts[idx] > 0) {
            prof.value[idx] = sums[idx] / static_cast<double>(counts[idx]);
            prof.has_data[idx] = 1;
        } else {
            prof.value[idx] = std::nan("");
        }
    }
    return prof;
}

HourlyProfile hourly_auc(const Series& s) {
    // Each inter-sample trapezoid is attributed to the hour of its left
    // endpoint; a day contributes to an hour's mean when the hour holds at
    // least one valid sample.
    std::map<std::pair<long, int>, double> area;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.is_valid(i)) continue;
        auto key = std::make_pair(utc_day(s.time_at(i)), utc_hour(s.time_at(i)));
        area.try_emplace(key, 0.0);
        if (i + 1 < s.size() && s.is_valid(i + 1))
            area[key] += 0.5 * (s.values[i] + s.values[i + 1]) * s.dt;
    }
    HourlyProfile prof;
    std::array<double, 24> sums{};
    std::array<std::size_t, 24> counts{};
    for (const auto& [key, a] : area) {
        sums[static_cast<std::size_t>(key.second)] += a;
        ++counts[static_cast<std::size_t>(key.second)];
    }
    for (int h = 0; h < 24; ++h) {
        auto idx = static_cast<std::size_t>(h);
        if (counts[idx] > 0) {
            prof.value[idx] = sums[idx] / static_cast<double>(counts[idx]);
            prof.has_data[idx] = 1;
        } else {
            prof.value[idx] = 0.0;
        }
    }
    return prof;
}

SnifferSummary sniffer_summary(const Series& normalized_ppm, const PresenceMask& presence,
                               const std::vector<EmissionEvent>& peaks, const Series& baseline,
                               double merge_gap_s) {
    const std::size_t n = normalized_ppm.size();
    if (presence.size() != n || baseline.size() != n)
        fail(Errc::alignment, "summary inputs must share one grid");

    SnifferSummary out;
    auto st = presence_stats(presence, normalized_ppm.t0, normalized_ppm.dt, merge_gap_s);
    out.pct_time_in_hood = st.pct_time;
    out.events_per_day = st.events_per_day;

    std::vector<double> ambient, during;
    for (std::size_t i = 0; i < n; ++i) {
        if (!presence.is_flagged(i) && baseline.is_valid(i)) ambient.push_back(baseline.values[i]);
        if (presence.is_flagged(i) && normalized_ppm.is_valid(i))
            during.push_back(normalized_ppm.values[i]);
    }
    out.ambient_mean_ppm = num::mean(ambient);
    out.ambient_sd_ppm = num::sample_sd(ambient);
    if (!during.empty()) {
        std::sort(during.begin(), during.end());
        out.ch4_median_ppm = num::quantile_sorted(during, 0.50);
        out.ch4_iqr_lo_ppm = num::quantile_sorted(during, 0.25);
        out.ch4_iqr_hi_ppm = num::quantile_sorted(during, 0.75);
    }
    double span_days = normalized_ppm.dt * static_cast<double>(n) / 86400.0;
    out.peaks_per_day =
        span_days > 0.0 ? static_cast<double>(peaks.size()) / span_days : 0.0;
    return out;
}

std::vector<AnovaRow> factorial_anova(const std::vector<Observation>& obs) {
    if (obs.empty()) fail(Errc::insufficient, "ANOVA needs observations");
    int na = 0, nb = 0, nc = 0;
    for (const auto& o : obs) {
        na = std::max(na, o.diet_or_animal + 1);
        nb = std::max(nb, o.sensor + 1);
        nc = std::max(nc, o.day + 1);
        if (o.diet_or_animal < 0 || o.sensor < 0 || o.day < 0)
            fail(Errc::data, "factor levels must be non-negative");
    }
    if (na < 2 || nb < 2 || nc < 2)
        fail(Errc::data, "ANOVA needs >= 2 levels per factor");

    auto idx3 = [&](int a, int b, int c) {
        return static_cast<std::size_t>((a * nb + b) * nc + c);
    };
    std::vector<double> cell_sum(static_cast<std::size_t>(na * nb * nc), 0.0);
    std::vector<std::size_t> cell_n(static_cast<std::size_t>(na * nb * nc), 0);
    double grand_sum = 0.0;
    for (const auto& o : obs) {
        cell_sum[idx3(o.diet_or_animal, o.sensor, o.day)] += o.value;
        ++cell_n[idx3(o.diet_or_animal, o.sensor, o.day)];
        grand_sum += o.value;
    }
    for (std::size_t i = 0; i < cell_n.size(); ++i)
        if (cell_n[i] == 0)
            fail(Errc::data,
                 "unbalanced design: a (diet_or_animal, sensor, day) cell is empty; "
                 "cell-mean imputation is off by default");

    const double N = static_cast<double>(obs.size());
    const double grand = grand_sum / N;

    // marginal means weighted by observation counts
    auto marginal = [&](auto level_of, int levels) {
        std::vector<double> sum(static_cast<std::size_t>(levels), 0.0);
        std::vector<double> n(static_cast<std::size_t>(levels), 0.0);
        for (const auto& o : obs) {
            sum[static_cast<std::size_t>(level_of(o))] += o.value;
            n[static_cast<std::size_t>(level_of(o))] += 1.0;
        }
        std::vector<double> m(static_cast<std::size_t>(levels), 0.0);
        for (int l = 0; l < levels; ++l)
            m[static_cast<std::size_t>(l)] =
                sum[static_cast<std::size_t>(l)] / n[static_cast<std::size_t>(l)];
        return m;
    };
    auto ma = marginal([](const Observation& o) { return o.diet_or_animal; }, na);
    auto mb = marginal([](const Observation& o) { return o.sensor; }, nb);
    auto mc = marginal([](const Observation& o) { return o.day; }, nc);

    auto pair_means = [&](auto a_of, int la, auto b_of, int lb) {
        std::vector<double> sum(static_cast<std::size_t>(la * lb), 0.0);
        std::vector<double> n(static_cast<std::size_t>(la * lb), 0.0);
        for (const auto& o : obs) {
            auto k = static_cast<std::size_t>(a_of(o) * lb + b_of(o));
            sum[k] += o.value;
            n[k] += 1.0;
        }
        for (std::size_t k = 0; k < sum.size(); ++k)
            if (n[k] > 0.0) sum[k] /= n[k];
        return sum;
    };
    auto mab = pair_means([](const Observation& o) { return o.diet_or_animal; }, na,
                          [](const Observation& o) { return o.sensor; }, nb);
    auto mac = pair_means([](const Observation& o) { return o.diet_or_animal; }, na,
                          [](const Observation& o) { return o.day; }, nc);
    auto mbc = pair_means([](const Observation& o) { return o.sensor; }, nb,
                          [](const Observation& o) { return o.day; }, nc);

    double ss_total = 0.0, ss_a = 0.0, ss_b = 0.0, ss_c = 0.0;
    double ss_ab = 0.0, ss_ac = 0.0, ss_bc = 0.0;
    for (const auto& o : obs) {
        const double ya = ma[static_cast<std::size_t>(o.diet_or_animal)];
        const double yb = mb[static_cast<std::size_t>(o.sensor)];
        const double yc = mc[static_cast<std::size_t>(o.day)];
        const double yab = mab[static_cast<std::size_t>(o.diet_or_animal * nb + o.sensor)];
        const double yac = mac[static_cast<std::size_t>(o.diet_or_animal * nc + o.day)];
        const double ybc = mbc[static_cast<std::size_t>(o.sensor * nc + o.day)];
        ss_total += (o.value - grand) * (o.value - grand);
        ss_a += (ya - grand) * (ya - grand);
        ss_b += (yb - grand) * (yb - grand);
        ss_c += (yc - grand) * (yc - grand);
        ss_ab += (yab - ya - yb + grand) * (yab - ya - yb + grand);
        ss_ac += (yac - ya - yc + grand) * (yac - ya - yc + grand);
        ss_bc += (ybc - yb - yc + grand) * (ybc - yb - yc + grand);
    }

    const double df_a = na - 1, df_b = nb - 1, df_c = nc - 1;
    const double df_ab = df_a * df_b, df_ac = df_a * df_c, df_bc = df_b * df_c;
    const double df_model = df_a + df_b + df_c + df_ab + df_ac + df_bc;
    const double df_res = N - 1.0 - df_model;
    if (df_res < 1.0) fail(Errc::insufficient, "no residual degrees of freedom");
    const double ss_res = ss_total - ss_a - ss_b - ss_c - ss_ab - ss_ac - ss_bc;
    const double ms_res = std::max(0.0, ss_res) / df_res;

    auto row = [&](const char* name, double df, double ss) {
        AnovaRow r;
        r.source = name;
        r.df = df;
        r.ss = ss;
        if (ms_res > 0.0) {
            r.F = (ss / df) / ms_res;
            r.p = num::f_sf(r.F, df, df_res);
        } else {
            r.F = 0.0;
            r.p = 1.0;
        }
        return r;
    };
    std::vector<AnovaRow> rows;
    rows.push_back(row("diet_or_animal", df_a, ss_a));
    rows.push_back(row("sensor", df_b, ss_b));
    rows.push_back(row("day", df_c, ss_c));
    rows.push_back(row("diet_or_animal x sensor", df_ab, ss_ab));
    rows.push_back(row("diet_or_animal x day", df_ac, ss_ac));
    rows.push_back(row("sensor x day", df_bc, ss_bc));
    AnovaRow resid;
    resid.source = "residual";
    resid.df = df_res;
    resid.ss = std::max(0.0, ss_res);
    resid.F = std::nan("");
    resid.p = std::nan("");
    rows.push_back(resid);
    return rows;
}

void write_anova_csv(std::ostream& out, const std::vector<AnovaRow>& rows) {
    // day enters as a fixed blocking factor
    out << "source,df,sum_of_squares,F,p\n";
    for (const auto& r : rows) {
        char buf[200];
        if (std::isnan(r.F)) {
            std::snprintf(buf, sizeof(buf), "%s,%.0f,%.8g,,\n", r.source.c_str(), r.df, r.ss);
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%.0f,%.8g,%.8g,%.8g\n", r.source.c_str(), r.df,
                          r.ss, r.F, r.p);
        }
        out << buf;
    }
}

}  // namespace scout
