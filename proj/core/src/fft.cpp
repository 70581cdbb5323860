#include "gridrate/fft.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "gridrate/errors.hpp"
#include "internal_util.hpp"

namespace gridrate {

namespace {

// Largest negative value a convolution of probabilities is allowed to
// produce before we treat it as a bug rather than roundoff.
constexpr double kArtifactTolerance = 1e-12;

std::size_t next_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

// Iterative radix-2 transform with precomputed twiddles and bit-reversal
// table. Immutable once built.
class FftPlan {
public:
    explicit FftPlan(std::size_t size) : size_(size) {
        assert(size >= 2 && (size & (size - 1)) == 0);
        bitrev_.resize(size);
        for (std::size_t i = 1; i < size; ++i) {
            bitrev_[i] = (bitrev_[i >> 1] >> 1) | ((i & 1) != 0 ? size >> 1 : 0);
        }
        fwd_roots_.resize(size / 2);
        inv_roots_.resize(size / 2);
        for (std::size_t k = 0; k < size / 2; ++k) {
            double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(size);
            fwd_roots_[k] = {std::cos(angle), std::sin(angle)};
            inv_roots_[k] = std::conj(fwd_roots_[k]);
        }
    }

    std::size_t size() const { return size_; }

    void forward(std::vector<std::complex<double>>& a) const { transform(a, fwd_roots_); }

    void inverse(std::vector<std::complex<double>>& a) const {
        transform(a, inv_roots_);
        double scale = 1.0 / static_cast<double>(size_);
        for (auto& v : a) v *= scale;
    }

private:
    void transform(std::vector<std::complex<double>>& a,
                   const std::vector<std::complex<double>>& roots) const {
        assert(a.size() == size_);
        for (std::size_t i = 0; i < size_; ++i) {
            if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
        }
        for (std::size_t len = 2; len <= size_; len <<= 1) {
            std::size_t half = len >> 1;
            std::size_t stride = size_ / len;
            for (std::size_t base = 0; base < size_; base += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    std::complex<double> w = roots[j * stride];
                    std::complex<double> u = a[base + j];
                    std::complex<double> v = a[base + j + half] * w;
                    a[base + j] = u + v;
                    a[base + j + half] = u - v;
                }
            }
        }
    }

    std::size_t size_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> fwd_roots_;
    std::vector<std::complex<double>> inv_roots_;
};

const FftPlan& plan_for(std::size_t size) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[size];
    if (!slot) slot = std::make_unique<FftPlan>(size);
    return *slot;
}

std::size_t conv_fft_size(int lags) {
    // Linear convolution of n+1 weights with a 2n+1 table needs 3n+1 slots.
    return next_pow2(static_cast<std::size_t>(3 * lags + 1));
}

std::vector<std::complex<double>> padded_spectrum(const FftPlan& plan,
                                                  std::span<const double> values) {
    std::vector<std::complex<double>> a(plan.size());
    for (std::size_t i = 0; i < values.size(); ++i) a[i] = values[i];
    plan.forward(a);
    return a;
}

void clamp_artifacts(std::vector<double>& weights) {
    for (double& w : weights) {
        if (w < 0.0) {
            if (w < -kArtifactTolerance) {
                throw Error("negative convolution artifact " + std::to_string(w) +
                            " exceeds tolerance");
            }
            w = 0.0;
        }
    }
}

GridDistribution finish_posterior(const Grid& grid, std::span<const double> prior,
                                  std::span<const double> likelihood) {
    std::vector<double> w(prior.size());
    for (std::size_t k = 0; k < prior.size(); ++k) w[k] = prior[k] * likelihood[k];
    clamp_artifacts(w);
    double total = util::kahan_sum(w);
    if (!std::isfinite(total)) throw Error("posterior evidence is not finite");
    if (total <= 0.0) {
        throw ImpossibleOutcomeError(
            "the luck function assigns probability zero to this outcome everywhere on the "
            "support");
    }
    for (double& v : w) v /= total;
    return GridDistribution::restore_weights(grid, std::move(w), 1e-9);
}

double heaviside(int d) {
    if (d > 0) return 1.0;
    if (d < 0) return 0.0;
    return 0.5;
}

}  // namespace

DifferenceKernelTable::DifferenceKernelTable(int lags, std::vector<double> values, Source source)
    : lags_(lags), values_(std::move(values)), source_(source) {
    if (lags < 1) throw std::invalid_argument("difference table needs at least one lag");
    if (values_.size() != static_cast<std::size_t>(2 * lags + 1)) {
        throw std::invalid_argument("difference table must have 2n+1 entries");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("difference table must be finite");
    }
}

DifferenceKernelTable DifferenceKernelTable::sigmoid_remainder(const LuckFunction& luck,
                                                               const Grid& grid) {
    if (!luck.difference_form()) {
        throw std::invalid_argument("luck function has no difference form");
    }
    int n = grid.intervals();
    std::vector<double> values(static_cast<std::size_t>(2 * n + 1));
    for (int d = -n; d <= n; ++d) {
        values[static_cast<std::size_t>(d + n)] =
            luck.sigmoid(d * grid.step()) - heaviside(d);
    }
    return DifferenceKernelTable(n, std::move(values), Source::sigmoid_remainder);
}

DifferenceKernelTable DifferenceKernelTable::score_kernel(const LuckFunction& luck,
                                                          const Grid& grid, double theta) {
    if (!luck.difference_form()) {
        throw std::invalid_argument("luck function has no difference form");
    }
    int n = grid.intervals();
    std::vector<double> values(static_cast<std::size_t>(2 * n + 1));
    for (int d = -n; d <= n; ++d) {
        values[static_cast<std::size_t>(d + n)] =
            detail::theta_power(luck.of_difference(d * grid.step()), theta);
    }
    return DifferenceKernelTable(n, std::move(values), Source::score_kernel);
}

DifferenceKernelTable DifferenceKernelTable::drift_kernel(const KernelSpec& kernel,
                                                          const Grid& grid) {
    int n = grid.intervals();
    std::vector<double> values(static_cast<std::size_t>(2 * n + 1), 0.0);
    if (kernel.is_identity()) {
        values[static_cast<std::size_t>(n)] = 1.0;
    } else {
        for (int d = -n; d <= n; ++d) {
            values[static_cast<std::size_t>(d + n)] = kernel.of_difference(d * grid.step());
        }
    }
    return DifferenceKernelTable(n, std::move(values), Source::drift_kernel);
}

std::vector<double> convolve(std::span<const double> rho, const DifferenceKernelTable& g) {
    int n = g.lags();
    if (rho.size() != static_cast<std::size_t>(n + 1)) {
        throw std::invalid_argument("weight count does not match the difference table");
    }
    const FftPlan& plan = plan_for(conv_fft_size(n));
    auto a = padded_spectrum(plan, rho);
    auto b = padded_spectrum(plan, g.values());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    plan.inverse(a);
    std::vector<double> out(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k + n)].real();
    return out;
}

std::vector<double> heaviside_prefix(std::span<const double> weights) {
    std::vector<double> out(weights.size());
    double running = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        running += 0.5 * weights[k];  // H(0) = 1/2: half before recording
        out[k] = running;
        running += 0.5 * weights[k];
    }
    return out;
}

std::vector<double> heaviside_prefix(const GridDistribution& rho) {
    return heaviside_prefix(rho.weights());
}

// ---------------------------------------------------------------------------
// FftMatchPlan

struct FftMatchPlan::Impl {
    Grid grid;
    LuckFunction luck;
    KernelSpec kernel;
    double beta;
    const FftPlan* plan;                               // owned by the global cache
    std::vector<std::complex<double>> remainder_spec;  // R = F - H
    std::vector<std::complex<double>> draw_spec;       // score kernel at theta = 1/2
    std::vector<std::complex<double>> drift_spec;      // empty for the identity kernel

    Impl(Grid g, LuckFunction l, KernelSpec k)
        : grid(g), luck(std::move(l)), kernel(std::move(k)), beta(0.0), plan(nullptr) {
        if (!luck.difference_form()) {
            throw std::invalid_argument("the FFT engine needs a difference-form luck function");
        }
        beta = luck.beta();
        plan = &plan_for(conv_fft_size(grid.intervals()));
        remainder_spec =
            padded_spectrum(*plan, DifferenceKernelTable::sigmoid_remainder(luck, grid).values());
        draw_spec =
            padded_spectrum(*plan, DifferenceKernelTable::score_kernel(luck, grid, 0.5).values());
        if (!kernel.is_identity()) {
            drift_spec =
                padded_spectrum(*plan, DifferenceKernelTable::drift_kernel(kernel, grid).values());
        }
    }

    void check_grid(const GridDistribution& dist) const {
        if (dist.grid() != grid) throw IntegrityError("distribution grid is incompatible");
    }

    // FFT of x + i*y, zero padded.
    std::vector<std::complex<double>> forward_pair(std::span<const double> x,
                                                   std::span<const double> y) const {
        std::vector<std::complex<double>> z(plan->size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = {x[i], y[i]};
        plan->forward(z);
        return z;
    }

    // Multiplies the packed spectrum by a shared real-kernel spectrum and
    // inverts; the two real convolutions come back as the real and
    // imaginary parts of the mid slice.
    void convolve_pair(std::vector<std::complex<double>> z,
                       const std::vector<std::complex<double>>& kernel_spec,
                       std::vector<double>& out_x, std::vector<double>& out_y) const {
        for (std::size_t i = 0; i < z.size(); ++i) z[i] *= kernel_spec[i];
        plan->inverse(z);
        int n = grid.intervals();
        out_x.resize(static_cast<std::size_t>(n + 1));
        out_y.resize(static_cast<std::size_t>(n + 1));
        for (int k = 0; k <= n; ++k) {
            out_x[static_cast<std::size_t>(k)] = z[static_cast<std::size_t>(k + n)].real();
            out_y[static_cast<std::size_t>(k)] = z[static_cast<std::size_t>(k + n)].imag();
        }
    }

    // Likelihood of a decisive outcome for one player given the opponent's
    // remainder convolution and Heaviside prefix.
    std::vector<double> decisive_likelihood(const std::vector<double>& conv_opp,
                                            const std::vector<double>& prefix_opp,
                                            bool won) const {
        std::vector<double> lik(conv_opp.size());
        if (won) {
            double base = 0.5 * (1.0 - beta);
            for (std::size_t k = 0; k < lik.size(); ++k) {
                lik[k] = base + beta * (conv_opp[k] + prefix_opp[k]);
            }
        } else {
            double base = 0.5 * (1.0 + beta);
            for (std::size_t k = 0; k < lik.size(); ++k) {
                lik[k] = base - beta * (conv_opp[k] + prefix_opp[k]);
            }
        }
        return lik;
    }

    GridDistribution apply_drift(const GridDistribution& rho) const {
        if (kernel.is_identity()) return rho;
        std::vector<double> zeros(rho.weights().size(), 0.0);
        std::vector<double> out, unused;
        convolve_pair(forward_pair(rho.weights(), zeros), drift_spec, out, unused);
        clamp_artifacts(out);
        util::normalize_in_place(out);
        return GridDistribution::restore_weights(grid, std::move(out), 1e-9);
    }

    // Drift for two posteriors sharing one transform pair.
    std::pair<GridDistribution, GridDistribution> apply_drift_pair(
        std::vector<double> a, std::vector<double> b) const {
        if (kernel.is_identity()) {
            return {GridDistribution::restore_weights(grid, std::move(a), 1e-9),
                    GridDistribution::restore_weights(grid, std::move(b), 1e-9)};
        }
        std::vector<double> da, db;
        convolve_pair(forward_pair(a, b), drift_spec, da, db);
        clamp_artifacts(da);
        clamp_artifacts(db);
        util::normalize_in_place(da);
        util::normalize_in_place(db);
        return {GridDistribution::restore_weights(grid, std::move(da), 1e-9),
                GridDistribution::restore_weights(grid, std::move(db), 1e-9)};
    }
};

FftMatchPlan::FftMatchPlan(Grid grid, LuckFunction luck, KernelSpec kernel)
    : impl_(std::make_unique<Impl>(grid, std::move(luck), std::move(kernel))) {}

FftMatchPlan::~FftMatchPlan() = default;
FftMatchPlan::FftMatchPlan(FftMatchPlan&&) noexcept = default;
FftMatchPlan& FftMatchPlan::operator=(FftMatchPlan&&) noexcept = default;

const Grid& FftMatchPlan::grid() const { return impl_->grid; }
const LuckFunction& FftMatchPlan::luck() const { return impl_->luck; }
const KernelSpec& FftMatchPlan::kernel() const { return impl_->kernel; }

GridDistribution FftMatchPlan::posterior(const GridDistribution& self,
                                         const GridDistribution& opponent,
                                         MatchScore score) const {
    const Impl& im = *impl_;
    im.check_grid(self);
    im.check_grid(opponent);
    std::vector<double> zeros(opponent.weights().size(), 0.0);
    std::vector<double> lik;
    if (score.is_decisive()) {
        std::vector<double> conv_opp, unused;
        im.convolve_pair(im.forward_pair(opponent.weights(), zeros), im.remainder_spec, conv_opp,
                         unused);
        lik = im.decisive_likelihood(conv_opp, heaviside_prefix(opponent.weights()),
                                     score.is_win());
    } else if (score.theta() == 0.5) {
        std::vector<double> unused;
        im.convolve_pair(im.forward_pair(opponent.weights(), zeros), im.draw_spec, lik, unused);
    } else {
        auto table = DifferenceKernelTable::score_kernel(im.luck, im.grid, score.theta());
        lik = convolve(opponent.weights(), table);
    }
    return finish_posterior(im.grid, self.weights(), lik);
}

std::pair<GridDistribution, GridDistribution> FftMatchPlan::match_update(
    const GridDistribution& a, const GridDistribution& b, MatchScore score_a) const {
    const Impl& im = *impl_;
    im.check_grid(a);
    im.check_grid(b);
    std::vector<double> lik_a, lik_b;
    if (score_a.is_decisive()) {
        std::vector<double> conv_a, conv_b;
        im.convolve_pair(im.forward_pair(a.weights(), b.weights()), im.remainder_spec, conv_a,
                         conv_b);
        lik_a = im.decisive_likelihood(conv_b, heaviside_prefix(b.weights()), score_a.is_win());
        lik_b = im.decisive_likelihood(conv_a, heaviside_prefix(a.weights()), !score_a.is_win());
    } else if (score_a.theta() == 0.5) {
        // The draw kernel is its own complement, so both sides share it.
        std::vector<double> conv_a, conv_b;
        im.convolve_pair(im.forward_pair(a.weights(), b.weights()), im.draw_spec, conv_a, conv_b);
        lik_a = std::move(conv_b);
        lik_b = std::move(conv_a);
    } else {
        auto table_a =
            DifferenceKernelTable::score_kernel(im.luck, im.grid, score_a.theta());
        auto table_b =
            DifferenceKernelTable::score_kernel(im.luck, im.grid, 1.0 - score_a.theta());
        lik_a = convolve(b.weights(), table_a);
        lik_b = convolve(a.weights(), table_b);
    }

    GridDistribution post_a = finish_posterior(im.grid, a.weights(), lik_a);
    GridDistribution post_b = finish_posterior(im.grid, b.weights(), lik_b);
    std::vector<double> wa(post_a.weights().begin(), post_a.weights().end());
    std::vector<double> wb(post_b.weights().begin(), post_b.weights().end());
    return im.apply_drift_pair(std::move(wa), std::move(wb));
}

GridDistribution FftMatchPlan::drift(const GridDistribution& rho) const {
    impl_->check_grid(rho);
    return impl_->apply_drift(rho);
}

double FftMatchPlan::predict(const GridDistribution& a, const GridDistribution& b) const {
    const Impl& im = *impl_;
    im.check_grid(a);
    im.check_grid(b);
    std::vector<double> zeros(b.weights().size(), 0.0);
    std::vector<double> conv_b, unused;
    im.convolve_pair(im.forward_pair(b.weights(), zeros), im.remainder_spec, conv_b, unused);
    auto lik = im.decisive_likelihood(conv_b, heaviside_prefix(b.weights()), true);
    util::KahanAccumulator acc;
    for (std::size_t k = 0; k < lik.size(); ++k) acc.add(a.weights()[k] * lik[k]);
    return acc.value();
}

// ---------------------------------------------------------------------------
// One-shot entry points

GridDistribution posterior_fft(const LuckFunction& luck, const GridDistribution& self,
                               const GridDistribution& opponent, MatchScore score) {
    if (!luck.difference_form()) {
        throw std::invalid_argument("the FFT engine needs a difference-form luck function");
    }
    if (self.grid() != opponent.grid()) throw IntegrityError("grids are incompatible");
    const Grid& grid = self.grid();
    std::vector<double> lik;
    if (score.is_decisive()) {
        auto remainder = DifferenceKernelTable::sigmoid_remainder(luck, grid);
        auto conv_opp = convolve(opponent.weights(), remainder);
        auto prefix_opp = heaviside_prefix(opponent.weights());
        double beta = luck.beta();
        lik.resize(conv_opp.size());
        if (score.is_win()) {
            for (std::size_t k = 0; k < lik.size(); ++k) {
                lik[k] = 0.5 * (1.0 - beta) + beta * (conv_opp[k] + prefix_opp[k]);
            }
        } else {
            for (std::size_t k = 0; k < lik.size(); ++k) {
                lik[k] = 0.5 * (1.0 + beta) - beta * (conv_opp[k] + prefix_opp[k]);
            }
        }
    } else {
        auto table = DifferenceKernelTable::score_kernel(luck, grid, score.theta());
        lik = convolve(opponent.weights(), table);
    }
    return finish_posterior(grid, self.weights(), lik);
}

GridDistribution kernel_fft(const KernelSpec& kernel, const GridDistribution& rho) {
    if (kernel.is_identity()) return rho;
    auto table = DifferenceKernelTable::drift_kernel(kernel, rho.grid());
    auto out = convolve(rho.weights(), table);
    clamp_artifacts(out);
    util::normalize_in_place(out);
    return GridDistribution::restore_weights(rho.grid(), std::move(out), 1e-9);
}

}  // namespace gridrate
