#include "gridrate/naive.hpp"

#include <cmath>
#include <stdexcept>

#include "gridrate/errors.hpp"
#include "internal_util.hpp"

namespace gridrate {

MatchScore::MatchScore(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("match score must lie in [0, 1]");
    }
}

namespace detail {

double theta_power(double lambda, double theta) {
    if (theta == 1.0) return lambda;
    if (theta == 0.0) return 1.0 - lambda;
    return std::pow(lambda, theta) * std::pow(1.0 - lambda, 1.0 - theta);
}

std::vector<double> posterior_weights(const LuckFunction& luck,
                                      std::span<const double> self_points,
                                      std::span<const double> self_weights,
                                      std::span<const double> opp_points,
                                      std::span<const double> opp_weights, double theta) {
    std::vector<double> out(self_points.size());
    for (std::size_t i = 0; i < self_points.size(); ++i) {
        if (self_weights[i] == 0.0) {
            out[i] = 0.0;
            continue;
        }
        util::KahanAccumulator evidence;
        for (std::size_t j = 0; j < opp_points.size(); ++j) {
            evidence.add(opp_weights[j] * theta_power(luck(self_points[i], opp_points[j]), theta));
        }
        out[i] = self_weights[i] * evidence.value();
    }
    double total = util::kahan_sum(out);
    if (!std::isfinite(total)) {
        throw Error("posterior evidence is not finite");
    }
    if (total <= 0.0) {
        throw ImpossibleOutcomeError(
            "the luck function assigns probability zero to this outcome everywhere on the "
            "support");
    }
    for (double& w : out) w /= total;
    return out;
}

std::vector<double> kernel_weights(const KernelSpec& kernel, std::span<const double> points,
                                   std::span<const double> weights) {
    std::vector<double> out(points.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        util::KahanAccumulator acc;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (weights[j] == 0.0) continue;
            acc.add(weights[j] * kernel(points[i], points[j]));
        }
        out[i] = acc.value();
    }
    double total = util::kahan_sum(out);
    if (!std::isfinite(total) || total <= 0.0) {
        throw Error("drift kernel produced zero total mass");
    }
    for (double& w : out) w /= total;
    return out;
}

}  // namespace detail

GridDistribution posterior_naive(const LuckFunction& luck, const GridDistribution& self,
                                 const GridDistribution& opponent, MatchScore score) {
    std::vector<double> sp = self.grid().points();
    std::vector<double> op = opponent.grid().points();
    auto w = detail::posterior_weights(luck, sp, self.weights(), op, opponent.weights(),
                                       score.theta());
    return GridDistribution::from_weights(self.grid(), std::move(w));
}

PointDistribution posterior_naive(const LuckFunction& luck, const PointDistribution& self,
                                  const PointDistribution& opponent, MatchScore score) {
    auto w = detail::posterior_weights(luck, self.support(), self.weights(), opponent.support(),
                                       opponent.weights(), score.theta());
    std::vector<double> support(self.support().begin(), self.support().end());
    return PointDistribution::from_points(std::move(support), std::move(w));
}

GridDistribution kernel_naive(const KernelSpec& kernel, const GridDistribution& rho) {
    if (kernel.is_identity()) return rho;
    std::vector<double> pts = rho.grid().points();
    auto w = detail::kernel_weights(kernel, pts, rho.weights());
    return GridDistribution::from_weights(rho.grid(), std::move(w));
}

PointDistribution kernel_naive(const KernelSpec& kernel, const PointDistribution& rho) {
    if (kernel.is_identity()) return rho;
    auto w = detail::kernel_weights(kernel, rho.support(), rho.weights());
    std::vector<double> support(rho.support().begin(), rho.support().end());
    return PointDistribution::from_points(std::move(support), std::move(w));
}

}  // namespace gridrate
