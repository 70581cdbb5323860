#include "gridrate/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace gridrate {

namespace {

double laplace_pdf(double d, double scale) {
    return 0.5 / scale * std::exp(-std::abs(d) / scale);
}

}  // namespace

KernelSpec KernelSpec::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("kernel sigma must be positive");
    }
    return KernelSpec(Kind::gaussian, sigma, {}, {});
}

KernelSpec KernelSpec::laplace_mix(std::vector<LaplaceComponent> mix) {
    if (mix.empty()) throw std::invalid_argument("kernel mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : mix) {
        if (!std::isfinite(c.weight) || c.weight < 0.0) {
            throw std::invalid_argument("kernel mixture weights must be finite and non-negative");
        }
        if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
            throw std::invalid_argument("kernel mixture scales must be positive");
        }
        total += c.weight;
    }
    if (!(total > 0.0)) throw std::invalid_argument("kernel mixture weights sum to zero");
    for (auto& c : mix) c.weight /= total;
    return KernelSpec(Kind::laplace_mix, 0.0, std::move(mix), {});
}

KernelSpec KernelSpec::tabulated(TabulatedCurve difference) {
    bool any_positive = false;
    for (double v : difference.values()) {
        if (v < 0.0) throw std::invalid_argument("kernel table must be non-negative");
        if (v > 0.0) any_positive = true;
    }
    if (!any_positive) throw std::invalid_argument("kernel table must not be identically zero");
    std::vector<TabulatedCurve> table;
    table.push_back(std::move(difference));
    return KernelSpec(Kind::tabulated, 0.0, {}, std::move(table));
}

KernelSpec KernelSpec::identity() { return KernelSpec(Kind::identity, 0.0, {}, {}); }

double KernelSpec::of_difference(double d) const {
    switch (kind_) {
        case Kind::gaussian:
            return std::exp(-d * d / (2.0 * sigma_ * sigma_));
        case Kind::laplace_mix: {
            double g = 0.0;
            for (const auto& c : mixture_) g += c.weight * laplace_pdf(d, c.scale);
            return g;
        }
        case Kind::tabulated:
            return table_.front()(d);
        case Kind::identity:
            return d == 0.0 ? 1.0 : 0.0;
    }
    throw std::logic_error("unreachable kernel kind");
}

double KernelSpec::sigma() const {
    if (kind_ != Kind::gaussian) throw std::logic_error("kernel is not Gaussian");
    return sigma_;
}

std::span<const LaplaceComponent> KernelSpec::mixture() const {
    if (kind_ != Kind::laplace_mix) throw std::logic_error("kernel is not a Laplace mixture");
    return mixture_;
}

}  // namespace gridrate
