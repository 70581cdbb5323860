#pragma once

#include <span>
#include <vector>

#include "gridrate/grid.hpp"
#include "gridrate/kernel.hpp"
#include "gridrate/luck.hpp"
#include "gridrate/naive.hpp"

namespace gridrate {

/// Q(y) = sum_k rho(x_k) * laplace_pdf(y - x_k | b) for every query point,
/// in O((m+n) log(m+n)): one ascending sweep with a decaying left
/// accumulator and one descending sweep with a decaying right accumulator.
/// Every multiplier is exp(-delta/b) with delta >= 0, so nothing grows.
std::vector<double> laplace_pdf_scan(const PointDistribution& rho, double scale_b,
                                     std::span<const double> queries);

/// T(y) = sum_k rho(x_k) * laplace_cdf(y - x_k | b), same sweep structure
/// plus a plain mass accumulator. Support points tied with a query count as
/// x_k <= y.
std::vector<double> laplace_cdf_scan(const PointDistribution& rho, double scale_b,
                                     std::span<const double> queries);

/// Posterior update for a Laplace-CDF-mixture luck function on arbitrary
/// finite supports. Only decisive scores (theta 0 or 1); fractional scores
/// are outside this engine's algebra.
PointDistribution posterior_laplace(const LuckFunction& luck, const PointDistribution& self,
                                    const PointDistribution& opponent, MatchScore score);

/// Drift smoothing for a Laplace-PDF-mixture kernel, evaluated on an
/// explicit output support (strictly increasing, non-empty).
PointDistribution kernel_laplace(const KernelSpec& kernel, const PointDistribution& rho,
                                 std::span<const double> output_support);

}  // namespace gridrate
