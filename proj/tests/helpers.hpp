#pragma once

#include <vector>

#include "scout/mathutil.hpp"
#include "scout/series.hpp"

namespace testutil {

inline scout::Series make_series(double t0, double dt, std::vector<double> values,
                                 scout::Unit unit = scout::Unit::ppm) {
    scout::Series s = scout::Series::uniform(t0, dt, values.size(), unit);
    for (std::size_t i = 0; i < values.size(); ++i) s.set(i, values[i]);
    return s;
}

inline scout::Series constant_series(double t0, double dt, std::size_t n, double value,
                                     scout::Unit unit = scout::Unit::ppm) {
    scout::Series s = scout::Series::uniform(t0, dt, n, unit);
    for (std::size_t i = 0; i < n; ++i) s.set(i, value);
    return s;
}

}  // namespace testutil
