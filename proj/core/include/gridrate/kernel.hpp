#pragma once

#include <span>
#include <vector>

#include "gridrate/tables.hpp"

namespace gridrate {

/// Drift kernel specification: K(x, y) = G(x - y) for a non-negative
/// difference function G, or the identity (no drift).
class KernelSpec {
public:
    enum class Kind { gaussian, laplace_mix, tabulated, identity };

    /// G(d) proportional to the normal density with standard deviation sigma.
    static KernelSpec gaussian(double sigma);

    /// G(d) = sum_j q_j * laplace_pdf(d | b_j); weights renormalized.
    static KernelSpec laplace_mix(std::vector<LaplaceComponent> mix);

    /// Arbitrary sampled non-negative difference function. An all-zero
    /// table is rejected.
    static KernelSpec tabulated(TabulatedCurve difference);

    static KernelSpec identity();

    Kind kind() const { return kind_; }
    bool is_identity() const { return kind_ == Kind::identity; }

    /// K(x, y). For the identity this is the discrete delta: 1 at x == y.
    double operator()(double x, double y) const { return of_difference(x - y); }
    double of_difference(double d) const;

    double sigma() const;                               // gaussian only
    std::span<const LaplaceComponent> mixture() const;  // laplace_mix only

private:
    KernelSpec(Kind kind, double sigma, std::vector<LaplaceComponent> mix,
               std::vector<TabulatedCurve> table)
        : kind_(kind), sigma_(sigma), mixture_(std::move(mix)), table_(std::move(table)) {}

    Kind kind_;
    double sigma_;
    std::vector<LaplaceComponent> mixture_;
    std::vector<TabulatedCurve> table_;  // empty or one entry
};

}  // namespace gridrate
