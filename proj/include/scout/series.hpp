#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace scout {

// Seconds since the Unix epoch, UTC. Millisecond resolution or better.
using Timestamp = double;

enum class Unit : std::uint8_t { ppm, mg_m3, l_min, celsius, mbar };

const char* unit_name(Unit u);

// Uniformly sampled signal with a per-sample validity mask. Invalid samples
// hold NaN and are excluded from every statistic downstream.
struct Series {
    Timestamp t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
    Unit unit = Unit::ppm;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    Timestamp time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    Timestamp end_time() const { return t0 + dt * static_cast<double>(size()); }
    bool is_valid(std::size_t i) const { return valid[i] != 0; }

    void set(std::size_t i, double v) {
        values[i] = v;
        valid[i] = 1;
    }
    void set_invalid(std::size_t i) {
        values[i] = std::numeric_limits<double>::quiet_NaN();
        valid[i] = 0;
    }
    std::size_t valid_count() const;

    // Index of the grid cell nearest to t (may be out of range).
    long index_of(Timestamp t) const { return std::lround((t - t0) / dt); }

    static Series uniform(Timestamp t0, double dt, std::size_t n, Unit unit);
};

// Half-open time interval [start, end).
struct Interval {
    Timestamp start = 0.0;
    Timestamp end = 0.0;

    double length() const { return end - start; }
    bool contains(Timestamp t) const { return t >= start && t < end; }
    bool overlaps(const Interval& o) const { return start < o.end && o.start < end; }
};

// Ordered, non-overlapping set of half-open intervals. add() merges overlaps
// and exact adjacency, so the invariants hold by construction.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> ivs);

    void add(Interval iv);
    IntervalSet padded(double before_s, double after_s) const;
    bool contains(Timestamp t) const;
    // Length of the overlap between [start, end) and this set.
    double overlap_length(const Interval& iv) const;
    double total_length() const;

    std::size_t size() const { return ivs_.size(); }
    bool empty() const { return ivs_.empty(); }
    const Interval& operator[](std::size_t i) const { return ivs_[i]; }
    auto begin() const { return ivs_.begin(); }
    auto end() const { return ivs_.end(); }

private:
    std::vector<Interval> ivs_;
};

}  // namespace scout
