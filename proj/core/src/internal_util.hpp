#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace gridrate::util {

// Compensated (Kahan) summation; keeps thousand-term sums at a few ulps.
inline double kahan_sum(std::span<const double> values) {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

class KahanAccumulator {
public:
    void add(double v) {
        double y = v - carry_;
        double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// Divides by the exact current sum. Throws std::invalid_argument when the
// sum is zero, negative, or not finite.
inline void normalize_in_place(std::vector<double>& weights) {
    double sum = kahan_sum(weights);
    if (!std::isfinite(sum) || sum <= 0.0) {
        throw std::invalid_argument("cannot normalize weights: total mass is " +
                                    std::to_string(sum));
    }
    for (double& w : weights) w /= sum;
}

inline double square(double x) { return x * x; }

}  // namespace gridrate::util
