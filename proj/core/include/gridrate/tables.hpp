#pragma once

#include <span>
#include <vector>

namespace gridrate {

/// One component of a Laplace mixture: a non-negative weight and a
/// positive scale parameter.
struct LaplaceComponent {
    double weight = 0.0;
    double scale = 1.0;
};

/// A function of a difference argument, sampled uniformly and linearly
/// interpolated between samples. values[i] is the sample at
/// (i - (size-1)/2) * step; the sample count must be odd so the curve is
/// centered at zero.
class TabulatedCurve {
public:
    // Behaviour outside the sampled range.
    enum class Extend {
        hold,  // clamp to the first/last sample (sigmoids with asymptotes)
        zero,  // vanish outside the table (compactly supported kernels)
    };

    TabulatedCurve(double step, std::vector<double> values, Extend extend);

    double operator()(double d) const;

    double step() const { return step_; }
    Extend extend() const { return extend_; }
    std::span<const double> values() const { return values_; }
    int half_span() const { return half_span_; }

private:
    double step_;
    std::vector<double> values_;
    Extend extend_;
    int half_span_;  // (values_.size() - 1) / 2
};

}  // namespace gridrate
