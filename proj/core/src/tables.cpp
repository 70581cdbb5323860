#include "gridrate/tables.hpp"

#include <cmath>
#include <stdexcept>

namespace gridrate {

TabulatedCurve::TabulatedCurve(double step, std::vector<double> values, Extend extend)
    : step_(step), values_(std::move(values)), extend_(extend) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("table step must be positive and finite");
    }
    if (values_.empty() || values_.size() % 2 == 0) {
        throw std::invalid_argument("table needs an odd number of samples centered at zero");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("table samples must be finite");
    }
    half_span_ = static_cast<int>(values_.size() / 2);
}

double TabulatedCurve::operator()(double d) const {
    double pos = d / step_;
    if (pos <= -half_span_) {
        if (pos == -half_span_) return values_.front();
        return extend_ == Extend::hold ? values_.front() : 0.0;
    }
    if (pos >= half_span_) {
        if (pos == half_span_) return values_.back();
        return extend_ == Extend::hold ? values_.back() : 0.0;
    }
    double shifted = pos + half_span_;
    double lower = std::floor(shifted);
    auto i = static_cast<std::size_t>(lower);
    double frac = shifted - lower;
    if (frac == 0.0) return values_[i];
    return (1.0 - frac) * values_[i] + frac * values_[i + 1];
}

}  // namespace gridrate
