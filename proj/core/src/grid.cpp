#include "gridrate/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "internal_util.hpp"

namespace gridrate {

Grid::Grid(int intervals, double half_width)
    : n_(intervals), half_width_(half_width), unit_(half_width / intervals) {
    if (intervals < 1) {
        throw std::invalid_argument("grid needs at least one interval, got " +
                                    std::to_string(intervals));
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw std::invalid_argument("grid half-width must be positive and finite");
    }
}

std::vector<double> Grid::points() const {
    std::vector<double> pts(static_cast<std::size_t>(size()));
    for (int k = 0; k <= n_; ++k) pts[static_cast<std::size_t>(k)] = point(k);
    return pts;
}

namespace {

void check_weights(const Grid& grid, const std::vector<double>& weights) {
    if (weights.size() != static_cast<std::size_t>(grid.size())) {
        throw std::invalid_argument("weight count " + std::to_string(weights.size()) +
                                    " does not match grid size " + std::to_string(grid.size()));
    }
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("weights must be finite and non-negative");
        }
    }
}

}  // namespace

GridDistribution GridDistribution::from_weights(const Grid& grid, std::vector<double> weights) {
    check_weights(grid, weights);
    util::normalize_in_place(weights);
    return GridDistribution(grid, std::move(weights));
}

GridDistribution GridDistribution::restore_weights(const Grid& grid, std::vector<double> weights,
                                                   double sum_tolerance) {
    check_weights(grid, weights);
    double sum = util::kahan_sum(weights);
    if (std::abs(sum - 1.0) > sum_tolerance) {
        throw std::invalid_argument("stored weights sum to " + std::to_string(sum) +
                                    ", expected 1 within " + std::to_string(sum_tolerance));
    }
    return GridDistribution(grid, std::move(weights));
}

GridDistribution GridDistribution::point_mass(const Grid& grid, int index) {
    if (index < 0 || index >= grid.size()) {
        throw std::invalid_argument("point-mass index out of range");
    }
    std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
    w[static_cast<std::size_t>(index)] = 1.0;
    return GridDistribution(grid, std::move(w));
}

double GridDistribution::mean() const {
    util::KahanAccumulator acc;
    for (int k = 0; k < grid_.size(); ++k) {
        acc.add(weights_[static_cast<std::size_t>(k)] * grid_.point(k));
    }
    return acc.value();
}

double GridDistribution::variance() const {
    double m = mean();
    util::KahanAccumulator acc;
    for (int k = 0; k < grid_.size(); ++k) {
        acc.add(weights_[static_cast<std::size_t>(k)] * util::square(grid_.point(k) - m));
    }
    return acc.value();
}

double GridDistribution::stddev() const { return std::sqrt(variance()); }

std::vector<double> GridDistribution::cdf() const {
    std::vector<double> out(weights_.size());
    double running = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        running += weights_[k];
        out[k] = running;
    }
    return out;
}

PointDistribution PointDistribution::from_points(std::vector<double> support,
                                                 std::vector<double> weights) {
    if (support.empty() || support.size() != weights.size()) {
        throw std::invalid_argument("support and weights must be non-empty and equal length");
    }
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (!std::isfinite(support[i])) {
            throw std::invalid_argument("support points must be finite");
        }
        if (i > 0 && !(support[i] > support[i - 1])) {
            throw std::invalid_argument("support must be strictly increasing");
        }
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
            throw std::invalid_argument("weights must be finite and non-negative");
        }
    }
    util::normalize_in_place(weights);
    return PointDistribution(std::move(support), std::move(weights));
}

PointDistribution PointDistribution::point_mass(double x) {
    return from_points({x}, {1.0});
}

double PointDistribution::mean() const {
    util::KahanAccumulator acc;
    for (std::size_t i = 0; i < support_.size(); ++i) acc.add(weights_[i] * support_[i]);
    return acc.value();
}

double PointDistribution::variance() const {
    double m = mean();
    util::KahanAccumulator acc;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        acc.add(weights_[i] * util::square(support_[i] - m));
    }
    return acc.value();
}

DisplayTransform::DisplayTransform() : scale(400.0 / std::numbers::ln10), offset(1500.0) {}

DisplayTransform::DisplayTransform(double scale_in, double offset_in)
    : scale(scale_in), offset(offset_in) {
    if (!std::isfinite(scale) || scale == 0.0 || !std::isfinite(offset)) {
        throw std::invalid_argument("display transform must be a strictly monotone affine map");
    }
}

double DisplayTransform::deviation(double stddev) const { return std::abs(scale) * stddev; }

DisplayRating display_rating(const DisplayTransform& t, const GridDistribution& dist) {
    return DisplayRating{t.rating(dist.mean()), t.deviation(dist.stddev())};
}

GridDistribution default_prior(const Grid& grid, double sigma0) {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
        throw std::invalid_argument("prior sigma must be positive");
    }
    std::vector<double> w(static_cast<std::size_t>(grid.size()));
    double inv_two_var = 1.0 / (2.0 * sigma0 * sigma0);
    for (int k = 0; k < grid.size(); ++k) {
        double x = grid.point(k);
        w[static_cast<std::size_t>(k)] = std::exp(-x * x * inv_two_var);
    }
    return GridDistribution::from_weights(grid, std::move(w));
}

}  // namespace gridrate
