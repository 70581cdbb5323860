#include "gridrate/luck.hpp"

#include <cmath>
#include <stdexcept>

#include "internal_util.hpp"

namespace gridrate {

namespace {

double logistic(double d) { return 1.0 / (1.0 + std::exp(-d)); }

double laplace_cdf(double d, double scale) {
    double e = 0.5 * std::exp(-std::abs(d) / scale);
    return d < 0.0 ? e : 1.0 - e;
}

void check_beta(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("beta must lie in [0, 1]");
    }
}

std::vector<LaplaceComponent> checked_mixture(std::vector<LaplaceComponent> mix) {
    if (mix.empty()) throw std::invalid_argument("mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : mix) {
        if (!std::isfinite(c.weight) || c.weight < 0.0) {
            throw std::invalid_argument("mixture weights must be finite and non-negative");
        }
        if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
            throw std::invalid_argument("mixture scales must be positive");
        }
        total += c.weight;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mixture weights sum to zero");
    for (auto& c : mix) c.weight /= total;
    return mix;
}

}  // namespace

LuckFunction LuckFunction::sigmoid_mix(double beta) {
    check_beta(beta);
    return LuckFunction(Kind::sigmoid_mix, beta, {}, {}, false);
}

LuckFunction LuckFunction::laplace_mix(double beta, std::vector<LaplaceComponent> mix) {
    check_beta(beta);
    return LuckFunction(Kind::laplace_mix, beta, checked_mixture(std::move(mix)), {}, false);
}

LuckFunction LuckFunction::tabulated(double beta, TabulatedCurve sigmoid) {
    check_beta(beta);
    auto values = sigmoid.values();
    std::size_t count = values.size();
    for (std::size_t i = 0; i < count; ++i) {
        if (values[i] < 0.0 || values[i] > 1.0) {
            throw std::invalid_argument("tabulated sigmoid samples must lie in [0, 1]");
        }
        if (i > 0 && values[i] < values[i - 1]) {
            throw std::invalid_argument("tabulated sigmoid must be non-decreasing");
        }
        if (std::abs(values[i] + values[count - 1 - i] - 1.0) > 1e-12) {
            throw std::invalid_argument("tabulated sigmoid must satisfy F(d) + F(-d) = 1");
        }
    }
    if (sigmoid.extend() != TabulatedCurve::Extend::hold) {
        throw std::invalid_argument("tabulated sigmoid must hold its asymptotes outside the table");
    }
    std::vector<TabulatedCurve> table;
    table.push_back(std::move(sigmoid));
    return LuckFunction(Kind::tabulated, beta, {}, std::move(table), false);
}

LuckFunction LuckFunction::ratio_bt() {
    return LuckFunction(Kind::ratio_bt, 1.0, {}, {}, false);
}

double LuckFunction::operator()(double x, double y) const {
    if (swapped_) std::swap(x, y);
    if (kind_ == Kind::ratio_bt) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw std::invalid_argument("ratio luck function needs positive performances");
        }
        return x / (x + y);
    }
    return 0.5 * (1.0 - beta_) + beta_ * sigmoid_unswapped(x - y);
}

double LuckFunction::sigmoid_unswapped(double d) const {
    switch (kind_) {
        case Kind::sigmoid_mix:
            return logistic(d);
        case Kind::laplace_mix: {
            double f = 0.0;
            for (const auto& c : mixture_) f += c.weight * laplace_cdf(d, c.scale);
            return f;
        }
        case Kind::tabulated:
            return table_.front()(d);
        case Kind::ratio_bt:
            break;
    }
    throw std::logic_error("luck function has no difference form");
}

LuckFunction LuckFunction::swapped() const {
    LuckFunction copy = *this;
    copy.swapped_ = !swapped_;
    return copy;
}

double LuckFunction::beta() const {
    if (!difference_form()) throw std::logic_error("luck function has no beta");
    return beta_;
}

double LuckFunction::sigmoid(double d) const {
    // Swapping the arguments of a difference form mirrors its sigmoid.
    return swapped_ ? sigmoid_unswapped(-d) : sigmoid_unswapped(d);
}

double LuckFunction::of_difference(double d) const {
    return 0.5 * (1.0 - beta()) + beta_ * sigmoid(d);
}

std::span<const LaplaceComponent> LuckFunction::mixture() const {
    if (kind_ != Kind::laplace_mix) {
        throw std::logic_error("luck function is not a Laplace mixture");
    }
    return mixture_;
}

namespace detail {

double expected_score_span(const LuckFunction& luck, std::span<const double> a_points,
                           std::span<const double> a_weights, std::span<const double> b_points,
                           std::span<const double> b_weights) {
    util::KahanAccumulator total;
    for (std::size_t i = 0; i < a_points.size(); ++i) {
        if (a_weights[i] == 0.0) continue;
        util::KahanAccumulator row;
        for (std::size_t j = 0; j < b_points.size(); ++j) {
            row.add(b_weights[j] * luck(a_points[i], b_points[j]));
        }
        total.add(a_weights[i] * row.value());
    }
    return total.value();
}

}  // namespace detail

double expected_score(const LuckFunction& luck, const GridDistribution& a,
                      const GridDistribution& b) {
    std::vector<double> ap = a.grid().points();
    std::vector<double> bp = b.grid().points();
    return detail::expected_score_span(luck, ap, a.weights(), bp, b.weights());
}

double expected_score(const LuckFunction& luck, const PointDistribution& a,
                      const PointDistribution& b) {
    return detail::expected_score_span(luck, a.support(), a.weights(), b.support(), b.weights());
}

}  // namespace gridrate
