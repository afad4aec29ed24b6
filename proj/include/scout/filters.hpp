#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scout/series.hpp"

namespace scout {

struct FilterConfig {
    int ma_window = 21;        // rectangular window, samples
    double es_alpha = 0.3;     // exponential smoothing weight
    int sg_window = 21;        // Savitzky-Golay window, samples
    int sg_order = 3;          // polynomial order
    double kf_process_var = 1.0;
    double kf_measurement_var = 1.0;
};

// Centered rectangular mean. Outputs within (w-1)/2 samples of a series edge
// or of any invalid sample are invalid; no partial windows.
Series moving_average(const Series& s, int window);

// y0 = x0; yk = alpha*xk + (1-alpha)*y(k-1). Invalid samples hold the state
// and emit invalid.
Series exp_smooth(const Series& s, double alpha);

// Convolution weights for the value-at-center least-squares polynomial fit
// on integer offsets, solved once per (window, order).
std::vector<double> savitzky_golay_coeffs(int window, int order);

Series savitzky_golay(const Series& s, int window, int order);

// Constant-velocity Kalman filter over (level, slope); returns the filtered
// level. Initialized from the first valid sample with a diffuse covariance.
Series kalman_cv(const Series& s, const FilterConfig& cfg);

struct FilterMetrics {
    std::string name;
    double peak_amplitude_retention = 0.0;  // mean filtered/raw peak height
    double lag_samples = 0.0;               // argmax cross-correlation offset
    double noise_suppression = 0.0;         // 1 - var(filtered)/var(raw) off-peak

    double combined_score(int window) const;
};

// Runs all four candidates with the given config against a raw trace whose
// true peak spans are known, and reports the selection metrics per filter.
std::vector<FilterMetrics> filter_compare(const Series& raw, const IntervalSet& truth_peaks,
                                          const FilterConfig& cfg);

void write_filter_metrics_csv(std::ostream& out, const std::vector<FilterMetrics>& metrics);

}  // namespace scout
