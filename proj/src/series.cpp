#include "scout/series.hpp"

#include <algorithm>

namespace scout {

const char* unit_name(Unit u) {
    switch (u) {
        case Unit::ppm: return "ppm";
        case Unit::mg_m3: return "mg/m3";
        case Unit::l_min: return "L/min";
        case Unit::celsius: return "degC";
        case Unit::mbar: return "mbar";
    }
    return "?";
}

std::size_t Series::valid_count() const {
    std::size_t n = 0;
    for (auto v : valid) n += (v != 0);
    return n;
}

Series Series::uniform(Timestamp t0, double dt, std::size_t n, Unit unit) {
    Series s;
    s.t0 = t0;
    s.dt = dt;
    s.unit = unit;
    s.values.assign(n, std::numeric_limits<double>::quiet_NaN());
    s.valid.assign(n, 0);
    return s;
}

IntervalSet::IntervalSet(std::vector<Interval> ivs) {
    for (const auto& iv : ivs) add(iv);
}

void IntervalSet::add(Interval iv) {
    if (!(iv.start < iv.end)) return;
    auto it = std::lower_bound(ivs_.begin(), ivs_.end(), iv,
                               [](const Interval& a, const Interval& b) { return a.start < b.start; });
    it = ivs_.insert(it, iv);
    // merge with neighbours that touch or overlap
    if (it != ivs_.begin() && std::prev(it)->end >= it->start) {
        auto prev = std::prev(it);
        prev->end = std::max(prev->end, it->end);
        it = ivs_.erase(it);
        it = prev;
    }
    while (std::next(it) != ivs_.end() && it->end >= std::next(it)->start) {
        it->end = std::max(it->end, std::next(it)->end);
        ivs_.erase(std::next(it));
    }
}

IntervalSet IntervalSet::padded(double before_s, double after_s) const {
    IntervalSet out;
    for (const auto& iv : ivs_) out.add({iv.start - before_s, iv.end + after_s});
    return out;
}

bool IntervalSet::contains(Timestamp t) const {
    auto it = std::upper_bound(ivs_.begin(), ivs_.end(), t,
                               [](Timestamp v, const Interval& iv) { return v < iv.start; });
    if (it == ivs_.begin()) return false;
    return std::prev(it)->contains(t);
}

double IntervalSet::overlap_length(const Interval& iv) const {
    double total = 0.0;
    for (const auto& o : ivs_) {
        if (o.start >= iv.end) break;
        double lo = std::max(o.start, iv.start);
        double hi = std::min(o.end, iv.end);
        if (hi > lo) total += hi - lo;
    }
    return total;
}

double IntervalSet::total_length() const {
    double total = 0.0;
    for (const auto& iv : ivs_) total += iv.length();
    return total;
}

}  // namespace scout
