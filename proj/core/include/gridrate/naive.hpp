#pragma once

#include <span>
#include <vector>

#include "gridrate/grid.hpp"
#include "gridrate/kernel.hpp"
#include "gridrate/luck.hpp"

namespace gridrate {

/// Generalized match outcome for the first player: 1 = win, 0 = loss,
/// 1/2 = draw; any value in [0, 1] is allowed.
class MatchScore {
public:
    explicit MatchScore(double theta);

    double theta() const { return theta_; }
    bool is_win() const { return theta_ == 1.0; }
    bool is_loss() const { return theta_ == 0.0; }
    bool is_decisive() const { return is_win() || is_loss(); }

    static MatchScore win() { return MatchScore(1.0); }
    static MatchScore loss() { return MatchScore(0.0); }
    static MatchScore draw() { return MatchScore(0.5); }

    MatchScore complement() const { return MatchScore(1.0 - theta_); }

private:
    double theta_;
};

/// Reference O(n*m) posterior update. The first player's belief is
/// reweighted by the likelihood of scoring theta against the opponent's
/// belief and renormalized. Supports need not be related in any way.
///
/// Throws ImpossibleOutcomeError when the evidence has zero total mass.
GridDistribution posterior_naive(const LuckFunction& luck, const GridDistribution& self,
                                 const GridDistribution& opponent, MatchScore score);
PointDistribution posterior_naive(const LuckFunction& luck, const PointDistribution& self,
                                  const PointDistribution& opponent, MatchScore score);

/// Reference O(n^2) drift smoothing on the distribution's own support:
/// out(x) proportional to sum_k rho(x_k) K(x, x_k).
GridDistribution kernel_naive(const KernelSpec& kernel, const GridDistribution& rho);
PointDistribution kernel_naive(const KernelSpec& kernel, const PointDistribution& rho);

namespace detail {

/// Likelihood factor lambda^theta * (1-lambda)^(1-theta), with 0^0 = 1 when
/// theta is exactly 0 or 1 so those cases reduce to the plain win/loss rule.
double theta_power(double lambda, double theta);

/// Unnormalized-tolerant core of posterior_naive: opponent weights need not
/// sum to one (the normalizer cancels). Returns normalized weights.
std::vector<double> posterior_weights(const LuckFunction& luck,
                                      std::span<const double> self_points,
                                      std::span<const double> self_weights,
                                      std::span<const double> opp_points,
                                      std::span<const double> opp_weights, double theta);

std::vector<double> kernel_weights(const KernelSpec& kernel,
                                   std::span<const double> points,
                                   std::span<const double> weights);

}  // namespace detail

}  // namespace gridrate
