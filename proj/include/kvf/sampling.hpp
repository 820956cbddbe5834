#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kvf/geometry.hpp"
#include "kvf/rng.hpp"
#include "kvf/scale_factor.hpp"

namespace kvf {

/// Deterministic chart-interior sample points: spatial coordinates rejection
/// sampled in the ball |x| < 0.9, time in a chart-appropriate safe interval.
/// Identical seed and count reproduce the list bit for bit.
inline std::vector<ChartPoint> sample_points(Chart chart, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample count must be at least 1");
    XorShift64Star rng(seed);
    const double t_half = chart == Chart::ModifiedU ? 1.5 : 1.25;
    std::vector<ChartPoint> pts;
    pts.reserve(count);
    while (static_cast<int>(pts.size()) < count) {
        ChartPoint p;
        p.chart = chart;
        p.coords[0] = rng.uniform(-t_half, t_half);
        for (int i = 1; i < 4; ++i) p.coords[i] = rng.uniform(-0.9, 0.9);
        if (p.spatial_norm2() >= 0.81) continue;
        pts.push_back(p);
    }
    return pts;
}

/// Samples restricted to the intersection of the chart interior and the
/// profile's time domain.
inline std::vector<ChartPoint> sample_points(const ScaleFactorProfile& profile, Chart chart,
                                             int count, std::uint64_t seed) {
    auto pts = sample_points(chart, count, seed);
    if (chart != Chart::ModifiedU) {
        const auto [lo, hi] = profile.safe_x0_interval();
        for (auto& p : pts) {
            if (p.coords[0] < lo || p.coords[0] > hi) {
                // rescale deterministically instead of resampling so the
                // spatial parts stay aligned across profiles
                const double t = (p.coords[0] + 1.25) / 2.5;
                p.coords[0] = lo + t * (hi - lo);
            }
        }
    }
    return pts;
}

} // namespace kvf
