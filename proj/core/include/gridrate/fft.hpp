#pragma once

#include <complex>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "gridrate/grid.hpp"
#include "gridrate/kernel.hpp"
#include "gridrate/luck.hpp"
#include "gridrate/naive.hpp"

namespace gridrate {

/// Samples of a difference function at grid lags: value(d) = g(d * step)
/// for d = -n..n, stored as a flat vector of length 2n+1.
class DifferenceKernelTable {
public:
    enum class Source {
        sigmoid_remainder,  // R = F - H, the decaying part of a sigmoid
        score_kernel,       // Lambda^theta (1-Lambda)^(1-theta) for fractional theta
        drift_kernel,       // G from a KernelSpec
    };

    DifferenceKernelTable(int lags, std::vector<double> values, Source source);

    int lags() const { return lags_; }  // n
    Source source() const { return source_; }
    double at(int d) const { return values_[static_cast<std::size_t>(d + lags_)]; }
    std::span<const double> values() const { return values_; }

    static DifferenceKernelTable sigmoid_remainder(const LuckFunction& luck, const Grid& grid);
    static DifferenceKernelTable score_kernel(const LuckFunction& luck, const Grid& grid,
                                              double theta);
    static DifferenceKernelTable drift_kernel(const KernelSpec& kernel, const Grid& grid);

private:
    int lags_;
    std::vector<double> values_;
    Source source_;
};

/// Linear convolution out(k) = sum_j rho(j) g(k - j) for k = 0..n, computed
/// with forward/inverse FFT zero-padded to the next power of two >= 3n+1;
/// matches direct summation within 1e-9 per entry.
std::vector<double> convolve(std::span<const double> rho, const DifferenceKernelTable& g);

/// L_H(k) = sum_j rho(j) H((k-j)*step) in one pass: the running sum picks up
/// half of rho(k) before recording and the other half after, because
/// H(0) = 1/2.
std::vector<double> heaviside_prefix(std::span<const double> weights);
std::vector<double> heaviside_prefix(const GridDistribution& rho);

/// FFT posterior update for difference-form luck functions on compatible
/// grids. Decisive scores use the sigmoid split F = H + R; fractional
/// scores convolve with the composite score kernel directly.
GridDistribution posterior_fft(const LuckFunction& luck, const GridDistribution& self,
                               const GridDistribution& opponent, MatchScore score);

/// FFT drift smoothing; identity kernels return the input unchanged.
GridDistribution kernel_fft(const KernelSpec& kernel, const GridDistribution& rho);

/// Precomputed transform state for repeated updates on one grid: spectra of
/// the sigmoid remainder, the draw kernel, and the drift kernel, plus the
/// twiddle tables. Immutable after construction and safe to share.
class FftMatchPlan {
public:
    FftMatchPlan(Grid grid, LuckFunction luck, KernelSpec kernel);
    ~FftMatchPlan();
    FftMatchPlan(FftMatchPlan&&) noexcept;
    FftMatchPlan& operator=(FftMatchPlan&&) noexcept;

    const Grid& grid() const;
    const LuckFunction& luck() const;
    const KernelSpec& kernel() const;

    /// Posterior for `self` scoring `score` against `opponent`.
    GridDistribution posterior(const GridDistribution& self, const GridDistribution& opponent,
                               MatchScore score) const;

    /// Both posteriors followed by the drift step, sharing transforms: the
    /// two real sequences ride one complex FFT in each direction.
    std::pair<GridDistribution, GridDistribution> match_update(const GridDistribution& a,
                                                               const GridDistribution& b,
                                                               MatchScore score_a) const;

    GridDistribution drift(const GridDistribution& rho) const;

    /// Expected score L(a, b) via one convolution instead of the O(n^2) sum.
    double predict(const GridDistribution& a, const GridDistribution& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gridrate
