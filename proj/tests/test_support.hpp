#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "gridrate/grid.hpp"

namespace gridrate::testing {

// Deterministic helpers shared by the suites. Everything takes an explicit
// engine so each test pins its own seed.

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t count,
                                          double zero_fraction = 0.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> w(count);
    for (double& v : w) {
        v = unit(rng);
        if (zero_fraction > 0.0 && unit(rng) < zero_fraction) v = 0.0;
    }
    // Guarantee some mass.
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
        w[count / 2] = 1.0;
    }
    return w;
}

inline GridDistribution random_grid_dist(std::mt19937_64& rng, const Grid& grid,
                                         double zero_fraction = 0.0) {
    return GridDistribution::from_weights(
        grid, random_weights(rng, static_cast<std::size_t>(grid.size()), zero_fraction));
}

// A smooth random belief: mixture of a few Gaussian bumps, closer to what
// the pipeline actually produces than raw noise.
inline GridDistribution random_smooth_dist(std::mt19937_64& rng, const Grid& grid) {
    std::uniform_real_distribution<double> center(-0.6 * grid.half_width(),
                                                  0.6 * grid.half_width());
    std::uniform_real_distribution<double> width(0.05 * grid.half_width(),
                                                 0.3 * grid.half_width());
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_int_distribution<int> bumps(1, 3);
    int count = bumps(rng);
    std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
    for (int b = 0; b < count; ++b) {
        double mu = center(rng);
        double s = width(rng);
        double a = amp(rng);
        for (int k = 0; k < grid.size(); ++k) {
            double x = grid.point(k);
            w[static_cast<std::size_t>(k)] += a * std::exp(-(x - mu) * (x - mu) / (2.0 * s * s));
        }
    }
    return GridDistribution::from_weights(grid, std::move(w));
}

inline std::vector<double> random_support(std::mt19937_64& rng, std::size_t count, double lo,
                                          double hi) {
    std::uniform_real_distribution<double> range(lo, hi);
    std::vector<double> pts(count);
    for (double& p : pts) p = range(rng);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

inline PointDistribution random_point_dist(std::mt19937_64& rng, std::size_t count, double lo,
                                           double hi) {
    auto pts = random_support(rng, count, lo, hi);
    return PointDistribution::from_points(pts, random_weights(rng, pts.size()));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

inline double max_rel_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double denom = std::max(std::abs(a[i]), std::abs(b[i]));
        if (denom == 0.0) continue;
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

}  // namespace gridrate::testing
