#include "scout/clock.hpp"

#include <algorithm>

namespace scout {

DriftMap::DriftMap(std::vector<DriftAnchor> anchors, double max_correction_s)
    : anchors_(std::move(anchors)), max_correction_s_(max_correction_s) {
    if (anchors_.size() < 2) fail(Errc::data, "drift correction needs at least 2 anchors");
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
        if (std::fabs(anchors_[i].true_t - anchors_[i].logged_t) > max_correction_s_)
            fail(Errc::data, "anchor offset exceeds sanity bound");
        if (i > 0 && !(anchors_[i].logged_t > anchors_[i - 1].logged_t))
            fail(Errc::data, "anchor logged times must be strictly increasing");
        if (i > 0 && !(anchors_[i].true_t > anchors_[i - 1].true_t))
            fail(Errc::data, "anchor true times must be strictly increasing");
    }
}

Timestamp DriftMap::operator()(Timestamp logged) const {
    // locate the segment; the first/last segment extends beyond the range
    std::size_t hi = 1;
    while (hi + 1 < anchors_.size() && logged >= anchors_[hi].logged_t) ++hi;
    const DriftAnchor& a = anchors_[hi - 1];
    const DriftAnchor& b = anchors_[hi];
    double f = (logged - a.logged_t) / (b.logged_t - a.logged_t);
    return a.true_t + f * (b.true_t - a.true_t);
}

}  // namespace scout
