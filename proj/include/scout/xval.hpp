#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "scout/events.hpp"
#include "scout/series.hpp"

namespace scout {

struct XvalConfig {
    std::vector<int> scales_min = {5, 10, 15, 20, 25, 30, 35, 40};
    double step_s = 60.0;           // window advancement
    double min_valid_frac = 0.8;    // valid-pair fraction a window must reach
    double q_threshold = 0.05;
    int min_valid_per_bin = 5;      // sniffer samples required per 10 s bin
    int jobs = 1;
};

// Paired samples on the coarse (in-rumen) grid: x = scout, y = binned sniffer.
struct PairedSeries {
    Timestamp t0 = 0.0;
    double dt = 10.0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::uint8_t> valid;  // both channels valid

    std::size_t size() const { return x.size(); }
    Timestamp time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

// Bins the 1 Hz sniffer series onto the scout grid (mean of valid samples in
// each centered bin, at least min_valid_per_bin of them) over the overlap.
PairedSeries align_pair(const Series& scout_ppm, const Series& sniffer_ppm,
                        int min_valid_per_bin = 5);

// Analysis segments: maximal spans where the animal is present, the sniffer
// reads above zero, and at least one eructation event falls inside; spans
// shorter than min_scale_s are dropped.
IntervalSet gate_events(const PairedSeries& pairs, const IntervalSet& presence,
                        const std::vector<EmissionEvent>& eructations, double min_scale_s);

// Residuals after subtracting the least-squares line over the sample index.
std::vector<double> detrend_linear(std::span<const double> x);

struct SignedR {
    double value = 0.0;  // sign(slope) * sqrt(R^2)
    double slope = 0.0;
    bool defined = false;
};
SignedR signed_r(std::span<const double> x, std::span<const double> y);

struct Ar1Result {
    double rho_x1 = 0.0;
    double rho_y1 = 0.0;
    double n_eff = 0.0;  // n (1 - rx ry) / (1 + rx ry), clamped to [3, n]
};
Ar1Result ar1_neff(std::span<const double> x, std::span<const double> y);

// Two-sided p of a correlation under t with n_eff - 2 df (non-integer ok).
double p_from_r(double r, double n_eff);

// Benjamini-Hochberg step-up q-values, order-preserving, ties stable.
std::vector<double> bh_fdr(const std::vector<double>& p_values);

struct WindowStat {
    Timestamp window_start = 0.0;
    int scale_min = 0;
    std::size_t n = 0;
    double r_pearson = 0.0;    // original values
    double r_detrended = 0.0;  // after per-window detrending
    double signed_R = 0.0;
    double slope = 0.0;
    double rho_x1 = 0.0;
    double rho_y1 = 0.0;
    double n_eff = 0.0;
    double p_raw = 0.0;  // detrended r at full n
    double p_eff = 0.0;  // detrended r at n_eff
    double q = 1.0;      // BH-FDR over p_eff, per scale
};

// Sliding windows per scale (1-minute advancement) inside each segment;
// windows below the valid-pair threshold are skipped. Output is ordered by
// (scale, window_start) regardless of cfg.jobs.
std::vector<WindowStat> window_sweep(const PairedSeries& pairs, const IntervalSet& segments,
                                     const XvalConfig& cfg);

// Number of step-aligned windows of `scale_len` samples in a `seg_len` run.
std::size_t window_count_closed_form(std::size_t seg_len, std::size_t scale_len,
                                     std::size_t step);

struct ScaleSummary {
    int scale_min = 0;
    std::size_t n_windows = 0;
    double mean_r = 0.0, sd_r = 0.0;
    double mean_r_detrended = 0.0, sd_r_detrended = 0.0;
    double mean_signed_R = 0.0, sd_signed_R = 0.0;
    double frac_significant = 0.0;  // q < threshold
};

std::vector<ScaleSummary> scale_summary(const std::vector<WindowStat>& stats,
                                        double q_threshold = 0.05);

void write_window_stats_csv(std::ostream& out, const std::vector<WindowStat>& stats);
void write_scale_summary_csv(std::ostream& out, const std::vector<ScaleSummary>& summaries);

}  // namespace scout
