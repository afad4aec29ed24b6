#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "scout/error.hpp"
#include "scout/records.hpp"

namespace scout {

// Piecewise-linear map from device-logged time to deployment-record time.
// Outside the anchor range the nearest segment's slope extrapolates.
class DriftMap {
public:
    DriftMap(std::vector<DriftAnchor> anchors, double max_correction_s = 120.0);

    Timestamp operator()(Timestamp logged) const;
    const std::vector<DriftAnchor>& anchors() const { return anchors_; }

private:
    std::vector<DriftAnchor> anchors_;
    double max_correction_s_;
};

// Applies the drift map to every record timestamp in place. Records must be
// time-sorted; the corrected sequence must remain strictly increasing.
template <class Rec>
void correct_clock_drift(std::vector<Rec>& records, const std::vector<DriftAnchor>& anchors,
                         double max_correction_s = 120.0) {
    DriftMap map(anchors, max_correction_s);
    Timestamp prev = -std::numeric_limits<double>::infinity();
    for (auto& rec : records) {
        Timestamp corrected = map(rec.t);
        if (std::fabs(corrected - rec.t) > max_correction_s)
            fail(Errc::data, "clock correction exceeds bound at t=" + std::to_string(rec.t));
        if (!(corrected > prev))
            fail(Errc::data, "clock correction broke timestamp ordering");
        rec.t = corrected;
        prev = corrected;
    }
}

struct GridResult {
    Series series;
    std::size_t duplicates = 0;  // grid cells contested by more than one record
};

// Resamples time-sorted records onto a uniform grid anchored at the first
// record. Each cell takes its nearest record (later record wins ties); a cell
// farther than 0.75*dt from every record stays invalid, so record gaps wider
// than 1.5*dt leave holes rather than fabricated values.
template <class Rec, class Field>
GridResult to_series(const std::vector<Rec>& records, double dt, Unit unit, Field&& field) {
    if (records.empty()) fail(Errc::insufficient, "cannot grid an empty record list");
    if (!(dt > 0.0)) fail(Errc::config, "grid dt must be positive");

    const Timestamp t0 = records.front().t;
    const Timestamp t_last = records.back().t;
    const std::size_t n = static_cast<std::size_t>(std::llround((t_last - t0) / dt)) + 1;

    GridResult out;
    out.series = Series::uniform(t0, dt, n, unit);
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint8_t> assigned(n, 0);

    const double tol = 0.75 * dt;
    for (const auto& rec : records) {
        long k = std::lround((rec.t - t0) / dt);
        if (k < 0 || static_cast<std::size_t>(k) >= n) continue;
        double d = std::fabs(rec.t - out.series.time_at(static_cast<std::size_t>(k)));
        if (d > tol) continue;
        auto idx = static_cast<std::size_t>(k);
        if (assigned[idx]) ++out.duplicates;
        if (d <= dist[idx]) {  // <= so the later record wins ties
            dist[idx] = d;
            assigned[idx] = 1;
            auto v = field(rec);
            if (v) {
                out.series.set(idx, *v);
            } else {
                out.series.set_invalid(idx);
            }
        }
    }
    return out;
}

}  // namespace scout
