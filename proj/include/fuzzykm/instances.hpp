#pragma once

// Small fixed instances with known behavior.

#include <cmath>

#include "fuzzykm/core.hpp"

namespace fuzzykm::instances {

/// {-3, -2, -1, 1, 2, 3}, unit weights. For m = 2, K = 2 the optimal means
/// are +-mu* with mu* the positive root of `radicals_polynomial`.
inline WeightedPointSet radicals() {
    return WeightedPointSet::unweighted({{-3.0}, {-2.0}, {-1.0}, {1.0}, {2.0}, {3.0}});
}

inline constexpr double kRadicalsRoot = 2.032093935;

/// 3x^12 + 84x^10 + 490x^8 - 292x^6 - 8981x^4 - 17640x^2 - 11664.
inline double radicals_polynomial(double x) {
    constexpr double c[] = {3, 84, 490, -292, -8981, -17640, -11664};
    const double x2 = x * x;
    double acc = 0.0;
    for (double v : c) acc = acc * x2 + v;
    return acc;
}

/// The rectangle {(a,1), (-a,1), (-a,-1), (a,-1)}, a > 1.
inline WeightedPointSet poor_local(double a) {
    detail::require(a > 1.0, ErrorKind::invalid_input, "a must exceed 1");
    return WeightedPointSet::unweighted({{a, 1.0}, {-a, 1.0}, {-a, -1.0}, {a, -1.0}});
}

/// FM from these means stays on a vertical line and ends far from optimal.
inline MeanSet poor_local_bad_init(double a) { return MeanSet({{a, 1.0}, {a, -1.0}}); }

inline MeanSet poor_local_good_init(double a) { return MeanSet({{a, 0.0}, {-a, 0.0}}); }

}  // namespace fuzzykm::instances
