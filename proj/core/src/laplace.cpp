#include "gridrate/laplace.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "gridrate/errors.hpp"
#include "internal_util.hpp"

namespace gridrate {

namespace {

// One entry of the merged sweep: support points carry their weight, query
// points carry none. At equal coordinates support points sort first, which
// keeps ties on the x_k <= y side of the cumulative sums.
struct SweepEvent {
    double coord;
    double weight;      // 0 for queries
    std::int64_t query; // -1 for support points
};

std::vector<SweepEvent> merge_events(const PointDistribution& rho,
                                     std::span<const double> queries) {
    std::vector<SweepEvent> events;
    events.reserve(rho.size() + queries.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        events.push_back({rho.support()[k], rho.weights()[k], -1});
    }
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (!std::isfinite(queries[i])) throw std::invalid_argument("queries must be finite");
        events.push_back({queries[i], 0.0, static_cast<std::int64_t>(i)});
    }
    auto before = [](const SweepEvent& a, const SweepEvent& b) {
        if (a.coord != b.coord) return a.coord < b.coord;
        return (a.query < 0) && (b.query >= 0);
    };
    // The support is sorted by construction; when the queries come sorted
    // too, a linear merge replaces the comparison sort.
    if (std::is_sorted(queries.begin(), queries.end())) {
        std::inplace_merge(events.begin(),
                           events.begin() + static_cast<std::ptrdiff_t>(rho.size()),
                           events.end(), before);
    } else {
        std::stable_sort(events.begin(), events.end(), before);
    }
    return events;
}

void check_scale(double b) {
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw std::invalid_argument("Laplace scale must be positive");
    }
}

}  // namespace

std::vector<double> laplace_pdf_scan(const PointDistribution& rho, double scale_b,
                                     std::span<const double> queries) {
    check_scale(scale_b);
    std::vector<double> out(queries.size(), 0.0);
    if (queries.empty()) return out;
    auto events = merge_events(rho, queries);
    double half_inv_b = 0.5 / scale_b;

    // Ascending sweep: mass at or left of each point, decayed to it.
    double left = 0.0;
    double prev = events.front().coord;
    for (const SweepEvent& e : events) {
        double delta = e.coord - prev;
        assert(delta >= 0.0);
        left = std::exp(-delta / scale_b) * left + half_inv_b * e.weight;
        if (e.query >= 0) out[static_cast<std::size_t>(e.query)] = left;
        prev = e.coord;
    }

    // Descending sweep: mass strictly right of each point. Recording happens
    // before the point's own mass is added, so ties stay on the left side.
    double right = 0.0;
    prev = events.back().coord;
    for (auto it = events.rbegin(); it != events.rend(); ++it) {
        double delta = prev - it->coord;
        assert(delta >= 0.0);
        right = std::exp(-delta / scale_b) * right;
        if (it->query >= 0) out[static_cast<std::size_t>(it->query)] += right;
        right += half_inv_b * it->weight;
        prev = it->coord;
    }
    return out;
}

std::vector<double> laplace_cdf_scan(const PointDistribution& rho, double scale_b,
                                     std::span<const double> queries) {
    check_scale(scale_b);
    std::vector<double> out(queries.size(), 0.0);
    if (queries.empty()) return out;
    auto events = merge_events(rho, queries);

    // T(y) = sum_{x_k <= y} rho(x_k)
    //      - sum_{x_k <= y} rho(x_k)/2 * exp((x_k - y)/b)
    //      + sum_{x_k > y}  rho(x_k)/2 * exp((y - x_k)/b).
    double mass = 0.0;
    double left = 0.0;
    double prev = events.front().coord;
    for (const SweepEvent& e : events) {
        double delta = e.coord - prev;
        assert(delta >= 0.0);
        mass += e.weight;
        left = std::exp(-delta / scale_b) * left + 0.5 * e.weight;
        if (e.query >= 0) out[static_cast<std::size_t>(e.query)] = mass - left;
        prev = e.coord;
    }

    double right = 0.0;
    prev = events.back().coord;
    for (auto it = events.rbegin(); it != events.rend(); ++it) {
        double delta = prev - it->coord;
        assert(delta >= 0.0);
        right = std::exp(-delta / scale_b) * right;
        if (it->query >= 0) out[static_cast<std::size_t>(it->query)] += right;
        right += 0.5 * it->weight;
        prev = it->coord;
    }
    return out;
}

PointDistribution posterior_laplace(const LuckFunction& luck, const PointDistribution& self,
                                    const PointDistribution& opponent, MatchScore score) {
    if (luck.kind() != LuckFunction::Kind::laplace_mix) {
        throw std::invalid_argument("the Laplace engine needs a Laplace-mixture luck function");
    }
    if (!score.is_decisive()) {
        throw std::invalid_argument(
            "the Laplace engine handles decisive scores only; fractional scores need the "
            "reference or FFT engine");
    }
    double beta = luck.beta();
    std::vector<double> mixed(self.size(), 0.0);
    for (const LaplaceComponent& c : luck.mixture()) {
        auto t = laplace_cdf_scan(opponent, c.scale, self.support());
        for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] += c.weight * t[i];
    }
    std::vector<double> weights(self.size());
    bool won = score.is_win() != luck.is_swapped();
    double base = won ? 0.5 * (1.0 - beta) : 0.5 * (1.0 + beta);
    double sign = won ? beta : -beta;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] = self.weights()[i] * (base + sign * mixed[i]);
    }
    double total = util::kahan_sum(weights);
    if (!std::isfinite(total)) throw Error("posterior evidence is not finite");
    if (total <= 0.0) {
        throw ImpossibleOutcomeError(
            "the luck function assigns probability zero to this outcome everywhere on the "
            "support");
    }
    for (double& w : weights) w /= total;
    std::vector<double> support(self.support().begin(), self.support().end());
    return PointDistribution::from_points(std::move(support), std::move(weights));
}

PointDistribution kernel_laplace(const KernelSpec& kernel, const PointDistribution& rho,
                                 std::span<const double> output_support) {
    if (kernel.kind() != KernelSpec::Kind::laplace_mix) {
        throw std::invalid_argument("the Laplace engine needs a Laplace-mixture kernel");
    }
    if (output_support.empty()) throw std::invalid_argument("output support is empty");
    std::vector<double> weights(output_support.size(), 0.0);
    for (const LaplaceComponent& c : kernel.mixture()) {
        auto q = laplace_pdf_scan(rho, c.scale, output_support);
        for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += c.weight * q[i];
    }
    std::vector<double> support(output_support.begin(), output_support.end());
    return PointDistribution::from_points(std::move(support), std::move(weights));
}

}  // namespace gridrate
