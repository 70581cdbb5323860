#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gridrate {

/// Uniform symmetric support {x_k = -M + (2M/n) k : k = 0..n}, stored as
/// (n, M) only. Two grids are compatible iff both parameters are equal.
class Grid {
public:
    Grid(int intervals, double half_width);

    int intervals() const { return n_; }     // n
    int size() const { return n_ + 1; }      // number of support points
    double half_width() const { return half_width_; }
    double step() const { return 2.0 * unit_; }

    // Point k. Evaluated as (2k - n) * (M/n) so that x_k == -x_{n-k} holds
    // exactly in floating point.
    double point(int k) const { return static_cast<double>(2 * k - n_) * unit_; }

    std::vector<double> points() const;

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n_ == b.n_ && a.half_width_ == b.half_width_;
    }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

private:
    int n_;
    double half_width_;
    double unit_;  // M / n
};

/// Normalized weight vector over a Grid. Weights are non-negative and sum
/// to one; every factory renormalizes by the exact current sum.
class GridDistribution {
public:
    /// Normalizes `weights` (which must be non-negative, finite, and not
    /// all zero) and attaches them to `grid`.
    static GridDistribution from_weights(const Grid& grid, std::vector<double> weights);

    /// Adopts already-normalized weights without rescaling, so that decimal
    /// round-trips keep their exact bits. The sum must be within
    /// `sum_tolerance` of one.
    static GridDistribution restore_weights(const Grid& grid, std::vector<double> weights,
                                            double sum_tolerance = 1e-6);

    static GridDistribution point_mass(const Grid& grid, int index);

    const Grid& grid() const { return grid_; }
    std::span<const double> weights() const { return weights_; }
    double weight(int k) const { return weights_[static_cast<std::size_t>(k)]; }

    double mean() const;
    double variance() const;
    double stddev() const;

    /// Cumulative weights; entry k is the mass at or below x_k.
    std::vector<double> cdf() const;

private:
    GridDistribution(const Grid& grid, std::vector<double> weights)
        : grid_(grid), weights_(std::move(weights)) {}

    Grid grid_;
    std::vector<double> weights_;
};

/// Probability distribution on an arbitrary strictly increasing finite
/// support; the representation used by the Laplace-scan engine and by the
/// reference engine when supports are not grid shaped.
class PointDistribution {
public:
    static PointDistribution from_points(std::vector<double> support,
                                         std::vector<double> weights);
    static PointDistribution point_mass(double x);

    std::span<const double> support() const { return support_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return support_.size(); }

    double mean() const;
    double variance() const;

private:
    PointDistribution(std::vector<double> support, std::vector<double> weights)
        : support_(std::move(support)), weights_(std::move(weights)) {}

    std::vector<double> support_;
    std::vector<double> weights_;
};

/// Affine map from internal strength units to displayed rating points.
struct DisplayTransform {
    double scale;   // default 400 / ln 10
    double offset;  // default 1500

    DisplayTransform();
    DisplayTransform(double scale, double offset);

    double rating(double mean) const { return scale * mean + offset; }
    double deviation(double stddev) const;
};

struct DisplayRating {
    double rating;
    double deviation;
};

DisplayRating display_rating(const DisplayTransform& t, const GridDistribution& dist);

/// Discretized centered normal prior: weights proportional to the normal
/// density with standard deviation sigma0 at the grid points.
GridDistribution default_prior(const Grid& grid, double sigma0);

}  // namespace gridrate
