#pragma once

#include <memory>
#include <utility>

#include "gridrate/config.hpp"
#include "gridrate/grid.hpp"
#include "gridrate/kernel.hpp"
#include "gridrate/luck.hpp"
#include "gridrate/naive.hpp"

namespace gridrate {

/// One interchangeable computational backend: posterior update, drift step,
/// and expected-score prediction on grid beliefs. Implementations are pure
/// and safe to share across threads.
class Engine {
public:
    virtual ~Engine() = default;

    virtual EngineKind kind() const = 0;
    virtual const Grid& grid() const = 0;
    virtual const LuckFunction& luck() const = 0;
    virtual const KernelSpec& kernel() const = 0;

    /// Posterior of `self` after scoring `score` against `opponent`
    /// (no drift applied).
    virtual GridDistribution posterior(const GridDistribution& self,
                                       const GridDistribution& opponent,
                                       MatchScore score) const = 0;

    virtual GridDistribution drift(const GridDistribution& belief) const = 0;

    /// Expected score L(a, b) of the first belief against the second.
    virtual double predict(const GridDistribution& a, const GridDistribution& b) const = 0;

    /// Full match step for both players: both posteriors from the pre-match
    /// beliefs, then drift applied to each. score_a is the first player's.
    virtual std::pair<GridDistribution, GridDistribution> match_update(
        const GridDistribution& a, const GridDistribution& b, MatchScore score_a) const;
};

std::unique_ptr<Engine> make_engine(EngineKind kind, const Grid& grid, LuckFunction luck,
                                    KernelSpec kernel);
std::unique_ptr<Engine> make_engine(const SystemConfig& config);

}  // namespace gridrate
