#pragma once

#include <span>
#include <vector>

#include "gridrate/grid.hpp"
#include "gridrate/tables.hpp"

namespace gridrate {

/// A luck function maps a pair of performance values to the first player's
/// expected score. All variants satisfy Lambda(x, y) + Lambda(y, x) = 1.
///
/// The difference-form variants are Lambda(x, y) = (1-beta)/2 + beta*F(x-y)
/// with F an increasing sigmoid running from 0 to 1; beta controls how much
/// of the outcome is pure chance. ratio_bt is the classical x/(x+y) rule on
/// positive supports and is supported by the reference engine only.
class LuckFunction {
public:
    enum class Kind { sigmoid_mix, laplace_mix, tabulated, ratio_bt };

    /// Difference form with the unit-scale logistic sigmoid.
    static LuckFunction sigmoid_mix(double beta);

    /// Difference form whose sigmoid is a mixture of Laplace CDFs
    /// {(p_j, a_j)}. Weights are renormalized to sum to one.
    static LuckFunction laplace_mix(double beta, std::vector<LaplaceComponent> mix);

    /// Difference form with an arbitrary sampled sigmoid. The samples must
    /// be non-decreasing, lie in [0, 1], and satisfy F(d) + F(-d) = 1.
    static LuckFunction tabulated(double beta, TabulatedCurve sigmoid);

    static LuckFunction ratio_bt();

    /// Lambda(x, y). Throws std::invalid_argument for non-positive inputs
    /// under ratio_bt.
    double operator()(double x, double y) const;

    /// The function with its arguments exchanged: Lambda'(x,y) = Lambda(y,x).
    LuckFunction swapped() const;

    Kind kind() const { return kind_; }
    bool difference_form() const { return kind_ != Kind::ratio_bt; }
    bool is_swapped() const { return swapped_; }

    // Difference-form accessors; throw std::logic_error for ratio_bt.
    double beta() const;
    double sigmoid(double d) const;        // F(d)
    double of_difference(double d) const;  // Lambda as a function of x - y

    std::span<const LaplaceComponent> mixture() const;  // laplace_mix only

private:
    LuckFunction(Kind kind, double beta, std::vector<LaplaceComponent> mix,
                 std::vector<TabulatedCurve> table, bool swapped)
        : kind_(kind),
          beta_(beta),
          mixture_(std::move(mix)),
          table_(std::move(table)),
          swapped_(swapped) {}

    double sigmoid_unswapped(double d) const;

    Kind kind_;
    double beta_;
    std::vector<LaplaceComponent> mixture_;
    std::vector<TabulatedCurve> table_;  // empty or one entry
    bool swapped_;
};

/// L(mu_A, mu_B): the first distribution's expected score against the
/// second, evaluated as the exact double sum over both supports with
/// compensated accumulation.
double expected_score(const LuckFunction& luck, const GridDistribution& a,
                      const GridDistribution& b);
double expected_score(const LuckFunction& luck, const PointDistribution& a,
                      const PointDistribution& b);

namespace detail {
double expected_score_span(const LuckFunction& luck, std::span<const double> a_points,
                           std::span<const double> a_weights,
                           std::span<const double> b_points,
                           std::span<const double> b_weights);
}  // namespace detail

}  // namespace gridrate
