#include "gridrate/engine.hpp"

#include <stdexcept>

#include "gridrate/errors.hpp"
#include "gridrate/fft.hpp"
#include "gridrate/laplace.hpp"
#include "internal_util.hpp"

namespace gridrate {

std::pair<GridDistribution, GridDistribution> Engine::match_update(const GridDistribution& a,
                                                                   const GridDistribution& b,
                                                                   MatchScore score_a) const {
    GridDistribution post_a = posterior(a, b, score_a);
    GridDistribution post_b = posterior(b, a, score_a.complement());
    return {drift(post_a), drift(post_b)};
}

namespace {

class NaiveEngine final : public Engine {
public:
    NaiveEngine(Grid grid, LuckFunction luck, KernelSpec kernel)
        : grid_(grid), luck_(std::move(luck)), kernel_(std::move(kernel)) {}

    EngineKind kind() const override { return EngineKind::naive; }
    const Grid& grid() const override { return grid_; }
    const LuckFunction& luck() const override { return luck_; }
    const KernelSpec& kernel() const override { return kernel_; }

    GridDistribution posterior(const GridDistribution& self, const GridDistribution& opponent,
                               MatchScore score) const override {
        check(self);
        check(opponent);
        return posterior_naive(luck_, self, opponent, score);
    }

    GridDistribution drift(const GridDistribution& belief) const override {
        check(belief);
        return kernel_naive(kernel_, belief);
    }

    double predict(const GridDistribution& a, const GridDistribution& b) const override {
        check(a);
        check(b);
        return expected_score(luck_, a, b);
    }

private:
    void check(const GridDistribution& dist) const {
        if (dist.grid() != grid_) throw IntegrityError("distribution grid is incompatible");
    }

    Grid grid_;
    LuckFunction luck_;
    KernelSpec kernel_;
};

class FftEngine final : public Engine {
public:
    FftEngine(Grid grid, LuckFunction luck, KernelSpec kernel)
        : plan_(grid, std::move(luck), std::move(kernel)) {}

    EngineKind kind() const override { return EngineKind::fft; }
    const Grid& grid() const override { return plan_.grid(); }
    const LuckFunction& luck() const override { return plan_.luck(); }
    const KernelSpec& kernel() const override { return plan_.kernel(); }

    GridDistribution posterior(const GridDistribution& self, const GridDistribution& opponent,
                               MatchScore score) const override {
        return plan_.posterior(self, opponent, score);
    }

    GridDistribution drift(const GridDistribution& belief) const override {
        return plan_.drift(belief);
    }

    double predict(const GridDistribution& a, const GridDistribution& b) const override {
        return plan_.predict(a, b);
    }

    std::pair<GridDistribution, GridDistribution> match_update(const GridDistribution& a,
                                                               const GridDistribution& b,
                                                               MatchScore score_a) const override {
        return plan_.match_update(a, b, score_a);
    }

private:
    FftMatchPlan plan_;
};

// Grid beliefs viewed as point distributions on the grid's support; the
// drift step writes back onto the same support. Fractional scores fall back
// to the reference path with the same luck function.
class LaplaceEngine final : public Engine {
public:
    LaplaceEngine(Grid grid, LuckFunction luck, KernelSpec kernel)
        : grid_(grid), luck_(std::move(luck)), kernel_(std::move(kernel)), points_(grid.points()) {
        if (luck_.kind() != LuckFunction::Kind::laplace_mix) {
            throw std::invalid_argument(
                "the Laplace engine needs a Laplace-mixture luck function");
        }
        if (!kernel_.is_identity() && kernel_.kind() != KernelSpec::Kind::laplace_mix) {
            throw std::invalid_argument("the Laplace engine needs a Laplace-mixture kernel");
        }
    }

    EngineKind kind() const override { return EngineKind::laplace; }
    const Grid& grid() const override { return grid_; }
    const LuckFunction& luck() const override { return luck_; }
    const KernelSpec& kernel() const override { return kernel_; }

    GridDistribution posterior(const GridDistribution& self, const GridDistribution& opponent,
                               MatchScore score) const override {
        check(self);
        check(opponent);
        if (!score.is_decisive()) {
            return posterior_naive(luck_, self, opponent, score);
        }
        auto result = posterior_laplace(luck_, as_points(self), as_points(opponent), score);
        return from_points(result);
    }

    GridDistribution drift(const GridDistribution& belief) const override {
        check(belief);
        if (kernel_.is_identity()) return belief;
        return from_points(kernel_laplace(kernel_, as_points(belief), points_));
    }

    double predict(const GridDistribution& a, const GridDistribution& b) const override {
        check(a);
        check(b);
        double beta = luck_.beta();
        PointDistribution pb = as_points(b);
        std::vector<double> mixed(points_.size(), 0.0);
        for (const LaplaceComponent& c : luck_.mixture()) {
            auto t = laplace_cdf_scan(pb, c.scale, points_);
            for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] += c.weight * t[i];
        }
        util::KahanAccumulator acc;
        auto weights = a.weights();
        for (std::size_t i = 0; i < mixed.size(); ++i) {
            acc.add(weights[i] * (0.5 * (1.0 - beta) + beta * mixed[i]));
        }
        return acc.value();
    }

private:
    void check(const GridDistribution& dist) const {
        if (dist.grid() != grid_) throw IntegrityError("distribution grid is incompatible");
    }

    PointDistribution as_points(const GridDistribution& dist) const {
        std::vector<double> w(dist.weights().begin(), dist.weights().end());
        return PointDistribution::from_points(points_, std::move(w));
    }

    GridDistribution from_points(const PointDistribution& dist) const {
        std::vector<double> w(dist.weights().begin(), dist.weights().end());
        return GridDistribution::restore_weights(grid_, std::move(w), 1e-9);
    }

    Grid grid_;
    LuckFunction luck_;
    KernelSpec kernel_;
    std::vector<double> points_;
};

}  // namespace

std::unique_ptr<Engine> make_engine(EngineKind kind, const Grid& grid, LuckFunction luck,
                                    KernelSpec kernel) {
    switch (kind) {
        case EngineKind::naive:
            return std::make_unique<NaiveEngine>(grid, std::move(luck), std::move(kernel));
        case EngineKind::fft:
            return std::make_unique<FftEngine>(grid, std::move(luck), std::move(kernel));
        case EngineKind::laplace:
            return std::make_unique<LaplaceEngine>(grid, std::move(luck), std::move(kernel));
    }
    throw std::logic_error("unreachable engine kind");
}

std::unique_ptr<Engine> make_engine(const SystemConfig& config) {
    config.validate();
    return make_engine(config.engine, config.grid(), config.luck(), config.kernel());
}

}  // namespace gridrate
