#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridrate/errors.hpp"
#include "gridrate/fft.hpp"
#include "gridrate/naive.hpp"
#include "test_support.hpp"

using namespace gridrate;
namespace gt = gridrate::testing;

namespace {

std::vector<double> direct_convolution(std::span<const double> rho,
                                       const DifferenceKernelTable& g) {
    std::vector<double> out(rho.size(), 0.0);
    int n = g.lags();
    for (int k = 0; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            acc += rho[static_cast<std::size_t>(j)] * g.at(k - j);
        }
        out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

DifferenceKernelTable sampled_gaussian_table(const Grid& grid, double sigma) {
    int n = grid.intervals();
    std::vector<double> values(static_cast<std::size_t>(2 * n + 1));
    for (int d = -n; d <= n; ++d) {
        double x = d * grid.step();
        values[static_cast<std::size_t>(d + n)] = std::exp(-x * x / (2.0 * sigma * sigma));
    }
    return DifferenceKernelTable(n, std::move(values),
                                 DifferenceKernelTable::Source::drift_kernel);
}

}  // namespace

TEST_CASE("convolving a point mass reads the table back out") {
    Grid grid(64, 2.0);
    auto table = sampled_gaussian_table(grid, 0.2);
    std::vector<double> rho(65, 0.0);
    rho[20] = 1.0;
    auto out = convolve(rho, table);
    for (int k = 0; k <= 64; ++k) {
        CHECK(out[static_cast<std::size_t>(k)] ==
              doctest::Approx(table.at(k - 20)).epsilon(1e-12));
    }
}

TEST_CASE("fft convolution matches direct summation on random input") {
    std::mt19937_64 rng(31);
    Grid grid(256, 4.0);
    auto table = sampled_gaussian_table(grid, 0.3);
    auto rho = gt::random_weights(rng, 257);
    CHECK(gt::max_abs_diff(convolve(rho, table), direct_convolution(rho, table)) <= 1e-9);
}

TEST_CASE("an all-zero table convolves to all zeros") {
    std::mt19937_64 rng(32);
    DifferenceKernelTable zero(16, std::vector<double>(33, 0.0),
                               DifferenceKernelTable::Source::drift_kernel);
    auto rho = gt::random_weights(rng, 17);
    for (double v : convolve(rho, zero)) CHECK(v == 0.0);
}

TEST_CASE("convolve rejects mismatched lengths") {
    DifferenceKernelTable table(4, std::vector<double>(9, 1.0),
                                DifferenceKernelTable::Source::drift_kernel);
    std::vector<double> rho(4, 0.25);
    CHECK_THROWS_AS(convolve(rho, table), std::invalid_argument);
}

TEST_CASE("heaviside prefix handles the half-weight convention") {
    std::vector<double> rho = {0.25, 0.5, 0.25};
    auto lh = heaviside_prefix(rho);
    CHECK(lh[0] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(lh[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lh[2] == doctest::Approx(0.875).epsilon(1e-15));
}

TEST_CASE("heaviside prefix of a point mass is a half step") {
    std::vector<double> rho(11, 0.0);
    rho[4] = 1.0;
    auto lh = heaviside_prefix(rho);
    for (std::size_t k = 0; k < rho.size(); ++k) {
        double expected = k < 4 ? 0.0 : (k == 4 ? 0.5 : 1.0);
        CHECK(lh[k] == expected);
    }
}

TEST_CASE("heaviside prefix of a uniform distribution is an arithmetic ramp") {
    std::size_t count = 21;
    std::vector<double> rho(count, 1.0 / static_cast<double>(count));
    auto lh = heaviside_prefix(rho);
    for (std::size_t k = 0; k < count; ++k) {
        CHECK(lh[k] == doctest::Approx((static_cast<double>(k) + 0.5) /
                                       static_cast<double>(count))
                           .epsilon(1e-13));
    }
}

TEST_CASE("the sigmoid remainder decays monotonically in both tails") {
    Grid grid(1000, 7.0);
    for (const LuckFunction& luck : {LuckFunction::sigmoid_mix(0.8),
                                     LuckFunction::laplace_mix(0.9, {{0.5, 0.6}, {0.5, 1.4}})}) {
        auto table = DifferenceKernelTable::sigmoid_remainder(luck, grid);
        int n = table.lags();
        CHECK(table.at(0) == 0.0);  // F(0) = H(0) = 1/2
        for (int d = 2; d <= n; ++d) {
            CHECK(std::abs(table.at(d)) <= std::abs(table.at(d - 1)) + 1e-15);
            CHECK(std::abs(table.at(-d)) <= std::abs(table.at(-(d - 1))) + 1e-15);
        }
        CHECK(std::abs(table.at(n)) < 1e-4);
    }
}

TEST_CASE("split decomposition recovers the full sigmoid sum") {
    std::mt19937_64 rng(33);
    Grid grid(200, 3.0);
    LuckFunction luck = LuckFunction::sigmoid_mix(0.8);
    auto remainder = DifferenceKernelTable::sigmoid_remainder(luck, grid);
    for (int trial = 0; trial < 100; ++trial) {
        auto rho = gt::random_weights(rng, 201);
        double sum = 0.0;
        for (double w : rho) sum += w;
        for (double& w : rho) w /= sum;

        auto lr = convolve(rho, remainder);
        auto lh = heaviside_prefix(rho);
        for (int k = 0; k <= 200; ++k) {
            double direct = 0.0;
            for (int j = 0; j <= 200; ++j) {
                direct += rho[static_cast<std::size_t>(j)] *
                          luck.sigmoid((k - j) * grid.step());
            }
            CHECK(std::abs(lr[static_cast<std::size_t>(k)] + lh[static_cast<std::size_t>(k)] -
                           direct) <= 1e-10);
        }
    }
}

TEST_CASE("fft posterior agrees with the reference engine across scores and betas") {
    std::mt19937_64 rng(34);
    Grid grid(200, 3.0);
    for (double beta : {0.0, 0.8, 0.99, 1.0 - 1e-9}) {
        LuckFunction luck = LuckFunction::sigmoid_mix(beta);
        for (double theta : {0.0, 0.5, 1.0, 0.37}) {
            auto a = gt::random_grid_dist(rng, grid);
            auto b = gt::random_grid_dist(rng, grid);
            auto fast = posterior_fft(luck, a, b, MatchScore(theta));
            auto slow = posterior_naive(luck, a, b, MatchScore(theta));
            CHECK(gt::max_abs_diff(fast.weights(), slow.weights()) <= 1e-9);
        }
    }
}

TEST_CASE("fft posterior handles Laplace-mixture and tabulated sigmoids too") {
    std::mt19937_64 rng(35);
    Grid grid(150, 3.0);
    std::vector<double> samples;
    for (int i = -300; i <= 300; ++i) {
        samples.push_back(0.5 * (1.0 + std::tanh(0.8 * i * 0.02)));
    }
    for (const LuckFunction& luck :
         {LuckFunction::laplace_mix(0.85, {{0.6, 0.7}, {0.4, 1.8}}),
          LuckFunction::tabulated(0.8, TabulatedCurve(0.02, samples,
                                                      TabulatedCurve::Extend::hold))}) {
        for (double theta : {0.0, 1.0, 0.5}) {
            auto a = gt::random_grid_dist(rng, grid);
            auto b = gt::random_grid_dist(rng, grid);
            auto fast = posterior_fft(luck, a, b, MatchScore(theta));
            auto slow = posterior_naive(luck, a, b, MatchScore(theta));
            CHECK(gt::max_abs_diff(fast.weights(), slow.weights()) <= 1e-9);
        }
    }
}

TEST_CASE("beta zero keeps the prior fixed through the fft path") {
    std::mt19937_64 rng(36);
    Grid grid(128, 2.0);
    auto a = gt::random_grid_dist(rng, grid);
    auto b = gt::random_grid_dist(rng, grid);
    auto post = posterior_fft(LuckFunction::sigmoid_mix(0.0), a, b, MatchScore::win());
    CHECK(gt::max_abs_diff(post.weights(), a.weights()) <= 1e-12);
}

TEST_CASE("a point-mass opponent reduces the posterior to pointwise luck") {
    std::mt19937_64 rng(37);
    Grid grid(120, 3.0);
    LuckFunction luck = LuckFunction::sigmoid_mix(0.8);
    auto a = gt::random_grid_dist(rng, grid);
    int j0 = 40;
    auto b = GridDistribution::point_mass(grid, j0);
    auto post = posterior_fft(luck, a, b, MatchScore::win());

    std::vector<double> expected(a.weights().size());
    double total = 0.0;
    for (int k = 0; k <= grid.intervals(); ++k) {
        expected[static_cast<std::size_t>(k)] =
            a.weight(k) * luck(grid.point(k), grid.point(j0));
        total += expected[static_cast<std::size_t>(k)];
    }
    for (double& w : expected) w /= total;
    CHECK(gt::max_abs_diff(post.weights(), expected) <= 1e-9);
}

TEST_CASE("fft drift matches the reference engine on the production grid") {
    std::mt19937_64 rng(38);
    Grid grid(1000, 7.0);
    auto rho = gt::random_grid_dist(rng, grid);
    auto kernel = KernelSpec::gaussian(0.03);
    auto fast = kernel_fft(kernel, rho);
    auto slow = kernel_naive(kernel, rho);
    CHECK(gt::max_abs_diff(fast.weights(), slow.weights()) <= 1e-9);
}

TEST_CASE("identity drift is exact") {
    std::mt19937_64 rng(39);
    Grid grid(100, 2.0);
    auto rho = gt::random_grid_dist(rng, grid);
    auto out = kernel_fft(KernelSpec::identity(), rho);
    CHECK(gt::max_abs_diff(out.weights(), rho.weights()) == 0.0);
}

TEST_CASE("two small drift steps land close to one sqrt-two step") {
    std::mt19937_64 rng(40);
    Grid grid(1000, 7.0);
    auto rho = gt::random_grid_dist(rng, grid);
    double sigma = 0.03;
    auto twice = kernel_fft(KernelSpec::gaussian(sigma),
                            kernel_fft(KernelSpec::gaussian(sigma), rho));
    auto once = kernel_fft(KernelSpec::gaussian(sigma * std::sqrt(2.0)), rho);
    double worst = 0.0;
    for (int k = 0; k <= grid.intervals(); ++k) {
        if (std::abs(grid.point(k)) > 6.0) continue;  // interior points only
        worst = std::max(worst, std::abs(twice.weight(k) - once.weight(k)));
    }
    CHECK(worst <= 2e-3);
}

TEST_CASE("fft paths reject unusable inputs") {
    std::mt19937_64 rng(41);
    Grid grid(32, 2.0);
    Grid other(32, 2.5);
    auto a = gt::random_grid_dist(rng, grid);
    auto b = gt::random_grid_dist(rng, other);
    CHECK_THROWS_AS(posterior_fft(LuckFunction::sigmoid_mix(0.8), a, b, MatchScore::win()),
                    IntegrityError);
    auto c = gt::random_grid_dist(rng, grid);
    CHECK_THROWS_AS(posterior_fft(LuckFunction::ratio_bt(), a, c, MatchScore::win()),
                    std::invalid_argument);
}

TEST_CASE("match plans agree with their one-shot counterparts") {
    std::mt19937_64 rng(42);
    Grid grid(250, 3.5);
    LuckFunction luck = LuckFunction::sigmoid_mix(0.8);
    KernelSpec kernel = KernelSpec::gaussian(0.05);
    FftMatchPlan plan(grid, luck, kernel);

    for (double theta : {1.0, 0.0, 0.5, 0.2}) {
        auto a = gt::random_smooth_dist(rng, grid);
        auto b = gt::random_smooth_dist(rng, grid);
        auto [pa, pb] = plan.match_update(a, b, MatchScore(theta));
        auto slow_a = kernel_fft(kernel, posterior_fft(luck, a, b, MatchScore(theta)));
        auto slow_b = kernel_fft(kernel, posterior_fft(luck, b, a, MatchScore(1.0 - theta)));
        CHECK(gt::max_abs_diff(pa.weights(), slow_a.weights()) <= 1e-12);
        CHECK(gt::max_abs_diff(pb.weights(), slow_b.weights()) <= 1e-12);

        double fast_p = plan.predict(a, b);
        double slow_p = expected_score(luck, a, b);
        CHECK(std::abs(fast_p - slow_p) <= 1e-9);
    }
}

TEST_CASE("per-source kernel normalization only differs near the boundary") {
    // Both engines renormalize the smoothed output globally. Normalizing
    // each source column instead (the other reading of the kernel
    // definition) changes nothing measurable for beliefs that keep their
    // mass away from the grid edge, and stays small even for mass parked
    // there. This pins the size of that modeling choice.
    Grid grid(1000, 7.0);
    KernelSpec kernel = KernelSpec::gaussian(0.03);

    auto per_source = [&](const GridDistribution& rho) {
        int n = grid.intervals();
        std::vector<double> column_mass(static_cast<std::size_t>(n + 1), 0.0);
        for (int j = 0; j <= n; ++j) {
            double total = 0.0;
            for (int i = 0; i <= n; ++i) total += kernel(grid.point(i), grid.point(j));
            column_mass[static_cast<std::size_t>(j)] = total;
        }
        std::vector<double> out(static_cast<std::size_t>(n + 1), 0.0);
        for (int i = 0; i <= n; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= n; ++j) {
                acc += rho.weight(j) * kernel(grid.point(i), grid.point(j)) /
                       column_mass[static_cast<std::size_t>(j)];
            }
            out[static_cast<std::size_t>(i)] = acc;
        }
        double total = 0.0;
        for (double w : out) total += w;
        for (double& w : out) w /= total;
        return out;
    };

    auto interior = default_prior(grid, 0.7);  // mass beyond +-5 is ~1e-22
    CHECK(gt::max_abs_diff(kernel_naive(kernel, interior).weights(), per_source(interior)) <=
          1e-15);

    std::vector<double> uniform(static_cast<std::size_t>(grid.size()), 1.0);
    auto edge_heavy = GridDistribution::from_weights(grid, std::move(uniform));
    double edge_diff =
        gt::max_abs_diff(kernel_naive(kernel, edge_heavy).weights(), per_source(edge_heavy));
    CHECK(edge_diff > 0.0);
    CHECK(edge_diff < 1e-3);
}

TEST_CASE("plan posterior equals the free function") {
    std::mt19937_64 rng(43);
    Grid grid(180, 3.0);
    LuckFunction luck = LuckFunction::laplace_mix(0.9, {{1.0, 1.2}});
    FftMatchPlan plan(grid, luck, KernelSpec::identity());
    auto a = gt::random_grid_dist(rng, grid);
    auto b = gt::random_grid_dist(rng, grid);
    for (double theta : {1.0, 0.0, 0.5}) {
        auto fast = plan.posterior(a, b, MatchScore(theta));
        auto free_fn = posterior_fft(luck, a, b, MatchScore(theta));
        CHECK(gt::max_abs_diff(fast.weights(), free_fn.weights()) <= 1e-12);
    }
}
