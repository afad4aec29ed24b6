#include "scout/filters.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "scout/error.hpp"
#include "scout/mathutil.hpp"

namespace scout {

namespace {

void check_window(int window, int order) {
    if (window < 1 || window % 2 == 0) fail(Errc::config, "filter window must be odd and >= 1");
    if (order >= 0 && window < order + 2)
        fail(Errc::config, "filter window must be >= order + 2");
}

// Applies a symmetric FIR kernel with the invalidate-incomplete-windows edge
// policy shared by the moving average and Savitzky-Golay filters.
Series apply_fir(const Series& s, const std::vector<double>& kernel) {
    const int h = static_cast<int>(kernel.size()) / 2;
    Series out = Series::uniform(s.t0, s.dt, s.size(), s.unit);
    const long n = static_cast<long>(s.size());
    long run_start = -1;
    for (long i = 0; i <= n; ++i) {
        bool v = i < n && s.is_valid(static_cast<std::size_t>(i));
        if (v && run_start < 0) run_start = i;
        if (!v && run_start >= 0) {
            // run [run_start, i) complete; fill interior points
            for (long k = run_start + h; k < i - h; ++k) {
                double acc = 0.0;
                for (int j = -h; j <= h; ++j)
                    acc += kernel[static_cast<std::size_t>(j + h)] *
                           s.values[static_cast<std::size_t>(k + j)];
                out.set(static_cast<std::size_t>(k), acc);
            }
            run_start = -1;
        }
    }
    return out;
}

}  // namespace

Series moving_average(const Series& s, int window) {
    check_window(window, -1);
    std::vector<double> kernel(static_cast<std::size_t>(window),
                               1.0 / static_cast<double>(window));
    return apply_fir(s, kernel);
}

Series exp_smooth(const Series& s, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) fail(Errc::config, "alpha must be in (0, 1]");
    if (s.empty()) fail(Errc::insufficient, "cannot smooth an empty series");
    Series out = Series::uniform(s.t0, s.dt, s.size(), s.unit);
    bool primed = false;
    double state = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.is_valid(i)) continue;  // hold state, emit invalid
        if (!primed) {
            state = s.values[i];
            primed = true;
        } else {
            state = alpha * s.values[i] + (1.0 - alpha) * state;
        }
        out.set(i, state);
    }
    return out;
}

std::vector<double> savitzky_golay_coeffs(int window, int order) {
    // order may run up to window-1 (the interpolating fit); the pipeline
    // config enforces the stricter window >= order + 2 separately
    if (window < 1 || window % 2 == 0) fail(Errc::config, "filter window must be odd and >= 1");
    if (order < 0 || order >= window) fail(Errc::config, "polynomial order must satisfy 0 <= order < window");
    const int h = window / 2;
    const int m = order + 1;
    // Gram matrix of offset moments M[p][q] = sum z^(p+q); solve M u = e0 so
    // the fitted polynomial's value at z = 0 is u . (1, z, z^2, ...).
    std::vector<double> M(static_cast<std::size_t>(m * m), 0.0);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            double acc = 0.0;
            for (int z = -h; z <= h; ++z) acc += std::pow(static_cast<double>(z), p + q);
            M[static_cast<std::size_t>(p * m + q)] = acc;
        }
    std::vector<double> u(static_cast<std::size_t>(m), 0.0);
    u[0] = 1.0;
    num::solve_linear(M, u);
    std::vector<double> c(static_cast<std::size_t>(window), 0.0);
    for (int z = -h; z <= h; ++z) {
        double acc = 0.0, zp = 1.0;
        for (int p = 0; p < m; ++p) {
            acc += u[static_cast<std::size_t>(p)] * zp;
            zp *= static_cast<double>(z);
        }
        c[static_cast<std::size_t>(z + h)] = acc;
    }
    return c;
}

Series savitzky_golay(const Series& s, int window, int order) {
    return apply_fir(s, savitzky_golay_coeffs(window, order));
}

Series kalman_cv(const Series& s, const FilterConfig& cfg) {
    if (s.empty()) fail(Errc::insufficient, "cannot filter an empty series");
    if (!(cfg.kf_process_var > 0.0) || !(cfg.kf_measurement_var > 0.0))
        fail(Errc::config, "Kalman variances must be positive");
    Series out = Series::uniform(s.t0, s.dt, s.size(), s.unit);

    const double dt = s.dt;
    const double q = cfg.kf_process_var;
    const double r = cfg.kf_measurement_var;
    // state x = (level, slope); transition [[1, dt], [0, 1]]
    double x0 = 0.0, x1 = 0.0;
    double p00 = 0.0, p01 = 0.0, p11 = 0.0;
    bool primed = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (primed) {
            // predict
            x0 += dt * x1;
            double n00 = p00 + dt * (p01 + p01) + dt * dt * p11 + q;
            double n01 = p01 + dt * p11;
            double n11 = p11 + q;
            p00 = n00;
            p01 = n01;
            p11 = n11;
        }
        if (!s.is_valid(i)) continue;  // no update, emit invalid
        if (!primed) {
            x0 = s.values[i];
            x1 = 0.0;
            p00 = p11 = 1e6;  // diffuse prior
            p01 = 0.0;
            primed = true;
        }
        // update with measurement z = level + noise
        double innov = s.values[i] - x0;
        double denom = p00 + r;
        double k0 = p00 / denom;
        double k1 = p01 / denom;
        x0 += k0 * innov;
        x1 += k1 * innov;
        double n00 = (1.0 - k0) * p00;
        double n01 = (1.0 - k0) * p01;
        double n11 = p11 - k1 * p01;
        p00 = n00;
        p01 = n01;
        p11 = n11;
        out.set(i, x0);
    }
    return out;
}

double FilterMetrics::combined_score(int window) const {
    return peak_amplitude_retention + noise_suppression -
           std::fabs(lag_samples) / static_cast<double>(window);
}

namespace {

// Peak height is measured above the interval's own floor so a drifting
// background does not mask the attenuation of the transient itself.
double peak_retention(const Series& raw, const Series& filt, const IntervalSet& peaks) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& iv : peaks) {
        double raw_max = -std::numeric_limits<double>::infinity();
        double raw_min = std::numeric_limits<double>::infinity();
        double filt_max = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            Timestamp t = raw.time_at(i);
            if (!iv.contains(t)) continue;
            if (raw.is_valid(i)) {
                raw_max = std::max(raw_max, raw.values[i]);
                raw_min = std::min(raw_min, raw.values[i]);
            }
            if (filt.is_valid(i)) {
                filt_max = std::max(filt_max, filt.values[i]);
                any = true;
            }
        }
        if (any && raw_max - raw_min > 0.0) {
            acc += (filt_max - raw_min) / (raw_max - raw_min);
            ++n;
        }
    }
    return n > 0 ? acc / static_cast<double>(n) : 0.0;
}

double xcorr_lag(const Series& raw, const Series& filt, int max_lag) {
    // de-meaned cross-correlation over pairs valid at both offsets
    std::vector<double> rv, fv;
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (raw.is_valid(i) && filt.is_valid(i)) {
            rv.push_back(raw.values[i]);
            fv.push_back(filt.values[i]);
        }
    if (rv.size() < 3) return 0.0;
    double rm = num::mean(rv), fm = num::mean(fv);

    const long n = static_cast<long>(raw.size());
    double best = -std::numeric_limits<double>::infinity();
    int best_lag = 0;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (long i = 0; i < n; ++i) {
            long j = i + lag;
            if (j < 0 || j >= n) continue;
            if (!raw.is_valid(static_cast<std::size_t>(i)) ||
                !filt.is_valid(static_cast<std::size_t>(j)))
                continue;
            acc += (raw.values[static_cast<std::size_t>(i)] - rm) *
                   (filt.values[static_cast<std::size_t>(j)] - fm);
            ++cnt;
        }
        if (cnt == 0) continue;
        acc /= static_cast<double>(cnt);
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    return best_lag;
}

double noise_suppression(const Series& raw, const Series& filt, const IntervalSet& peaks) {
    // pooled per-span demeaned variance outside the peak intervals
    double raw_ss = 0.0, filt_ss = 0.0;
    std::size_t total = 0;
    std::vector<double> rv, fv;
    auto flush = [&]() {
        if (rv.size() < 2) {
            rv.clear();
            fv.clear();
            return;
        }
        double rm = num::mean(rv), fm = num::mean(fv);
        for (std::size_t k = 0; k < rv.size(); ++k) {
            raw_ss += (rv[k] - rm) * (rv[k] - rm);
            filt_ss += (fv[k] - fm) * (fv[k] - fm);
        }
        total += rv.size();
        rv.clear();
        fv.clear();
    };
    for (std::size_t i = 0; i < raw.size(); ++i) {
        bool usable = raw.is_valid(i) && filt.is_valid(i) && !peaks.contains(raw.time_at(i));
        if (usable) {
            rv.push_back(raw.values[i]);
            fv.push_back(filt.values[i]);
        } else {
            flush();
        }
    }
    flush();
    if (total < 2 || raw_ss <= 0.0) return 0.0;
    return 1.0 - filt_ss / raw_ss;
}

}  // namespace

std::vector<FilterMetrics> filter_compare(const Series& raw, const IntervalSet& truth_peaks,
                                          const FilterConfig& cfg) {
    if (truth_peaks.empty()) fail(Errc::insufficient, "filter comparison needs truth peaks");
    struct Candidate {
        const char* name;
        Series filtered;
    };
    std::vector<Candidate> candidates;
    candidates.push_back({"MA", moving_average(raw, cfg.ma_window)});
    candidates.push_back({"ES", exp_smooth(raw, cfg.es_alpha)});
    candidates.push_back({"SG", savitzky_golay(raw, cfg.sg_window, cfg.sg_order)});
    candidates.push_back({"KF", kalman_cv(raw, cfg)});

    std::vector<FilterMetrics> out;
    for (auto& c : candidates) {
        FilterMetrics m;
        m.name = c.name;
        m.peak_amplitude_retention = peak_retention(raw, c.filtered, truth_peaks);
        m.lag_samples = xcorr_lag(raw, c.filtered, cfg.sg_window);
        m.noise_suppression = noise_suppression(raw, c.filtered, truth_peaks);
        out.push_back(std::move(m));
    }
    return out;
}

void write_filter_metrics_csv(std::ostream& out, const std::vector<FilterMetrics>& metrics) {
    out << "filter,peak_amplitude_retention,lag_samples,noise_suppression\n";
    for (const auto& m : metrics) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.1f,%.6f\n", m.name.c_str(),
                      m.peak_amplitude_retention, m.lag_samples, m.noise_suppression);
        out << buf;
    }
}

}  // namespace scout
