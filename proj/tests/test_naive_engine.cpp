#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridrate/errors.hpp"
#include "gridrate/naive.hpp"
#include "test_support.hpp"

using namespace gridrate;
namespace gt = gridrate::testing;

namespace {

PointDistribution example_players_a() {
    return PointDistribution::from_points({2.0, 5.0, 13.0}, {9.0 / 20, 3.0 / 20, 8.0 / 20});
}

PointDistribution example_players_b() {
    return PointDistribution::from_points({3.0, 7.0, 11.0}, {2.0 / 11, 4.0 / 11, 5.0 / 11});
}

}  // namespace

TEST_CASE("match score validates its range") {
    CHECK_THROWS_AS(MatchScore(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(MatchScore(1.1), std::invalid_argument);
    CHECK(MatchScore::draw().theta() == 0.5);
    CHECK(MatchScore::win().complement().theta() == 0.0);
    CHECK(MatchScore(0.3).is_decisive() == false);
}

TEST_CASE("golden ratio-rule posteriors come out as exact fractions") {
    auto a = example_players_a();
    auto b = example_players_b();
    LuckFunction ratio = LuckFunction::ratio_bt();

    auto post_a = posterior_naive(ratio, a, b, MatchScore::win());
    CHECK(std::abs(post_a.weights()[0] - 69024.0 / 284005.0) <= 1e-12);
    CHECK(std::abs(post_a.weights()[1] - 41925.0 / 284005.0) <= 1e-12);
    CHECK(std::abs(post_a.weights()[2] - 173056.0 / 284005.0) <= 1e-12);

    // The loser's update still uses the winner's pre-match belief.
    auto post_b = posterior_naive(ratio, b, a, MatchScore::loss());
    CHECK(std::abs(post_b.weights()[0] - 74724.0 / 284005.0) <= 1e-12);
    CHECK(std::abs(post_b.weights()[1] - 105456.0 / 284005.0) <= 1e-12);
    CHECK(std::abs(post_b.weights()[2] - 103825.0 / 284005.0) <= 1e-12);
}

TEST_CASE("win-posterior normalizer equals the expected score") {
    auto a = example_players_a();
    auto b = example_players_b();
    LuckFunction ratio = LuckFunction::ratio_bt();
    double normalizer = expected_score(ratio, a, b);
    auto post = posterior_naive(ratio, a, b, MatchScore::win());
    // Reconstruct each weight from the definition.
    for (std::size_t i = 0; i < a.size(); ++i) {
        double evidence = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            evidence += b.weights()[j] * ratio(a.support()[i], b.support()[j]);
        }
        double expected = a.weights()[i] * evidence / normalizer;
        CHECK(std::abs(post.weights()[i] - expected) <= 1e-12);
    }
}

TEST_CASE("a constant luck function leaves the prior untouched") {
    std::mt19937_64 rng(21);
    Grid grid(50, 3.0);
    LuckFunction coin = LuckFunction::sigmoid_mix(0.0);
    for (double theta : {0.0, 0.25, 0.5, 1.0}) {
        auto prior = gt::random_grid_dist(rng, grid);
        auto post = posterior_naive(coin, prior, gt::random_grid_dist(rng, grid),
                                    MatchScore(theta));
        CHECK(gt::max_abs_diff(post.weights(), prior.weights()) <= 1e-15);
    }
}

TEST_CASE("fractional scores match a brute-force geometric-mean sum") {
    std::mt19937_64 rng(22);
    Grid grid(40, 2.0);
    LuckFunction luck = LuckFunction::sigmoid_mix(0.8);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = gt::random_grid_dist(rng, grid);
        auto b = gt::random_grid_dist(rng, grid);
        double theta = 0.5;
        auto post = posterior_naive(luck, a, b, MatchScore(theta));

        // Independent oracle, straight from the definition.
        std::vector<double> expected(a.weights().size());
        double total = 0.0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            double evidence = 0.0;
            for (std::size_t j = 0; j < expected.size(); ++j) {
                double lam = luck(grid.point(static_cast<int>(i)), grid.point(static_cast<int>(j)));
                evidence += b.weights()[j] * std::sqrt(lam * (1.0 - lam));
            }
            expected[i] = a.weights()[i] * evidence;
            total += expected[i];
        }
        for (double& w : expected) w /= total;
        CHECK(gt::max_abs_diff(post.weights(), expected) <= 1e-12);
    }
}

TEST_CASE("golden box-kernel smoothing spreads perfect squares to 1/28") {
    std::vector<double> support(100);
    std::vector<double> weights(100, 0.0);
    for (int i = 0; i < 100; ++i) {
        support[static_cast<std::size_t>(i)] = i + 1;
        int root = static_cast<int>(std::round(std::sqrt(i + 1.0)));
        if (root * root == i + 1) weights[static_cast<std::size_t>(i)] = 0.1;
    }
    auto rho = PointDistribution::from_points(support, weights);
    auto box = KernelSpec::tabulated(
        TabulatedCurve(1.0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, TabulatedCurve::Extend::zero));
    auto smoothed = kernel_naive(box, rho);

    std::vector<int> expected_support = {1,  2,  3,  4,  5,  8,  9,  10, 15, 16, 17, 24, 25, 26,
                                         35, 36, 37, 48, 49, 50, 63, 64, 65, 80, 81, 82, 99, 100};
    std::size_t hits = 0;
    for (int i = 0; i < 100; ++i) {
        bool in_set = std::find(expected_support.begin(), expected_support.end(), i + 1) !=
                      expected_support.end();
        double w = smoothed.weights()[static_cast<std::size_t>(i)];
        if (in_set) {
            CHECK(std::abs(w - 1.0 / 28.0) <= 1e-12);
            ++hits;
        } else {
            CHECK(w == 0.0);
        }
    }
    CHECK(hits == 28);
}

TEST_CASE("identity kernel returns the input unchanged") {
    std::mt19937_64 rng(23);
    Grid grid(30, 2.0);
    auto rho = gt::random_grid_dist(rng, grid);
    auto out = kernel_naive(KernelSpec::identity(), rho);
    CHECK(gt::max_abs_diff(out.weights(), rho.weights()) == 0.0);
}

TEST_CASE("gaussian smoothing matches an independent direct summation") {
    std::mt19937_64 rng(24);
    Grid grid(50, 2.0);
    auto rho = gt::random_grid_dist(rng, grid);
    auto out = kernel_naive(KernelSpec::gaussian(0.1), rho);

    std::vector<double> expected(rho.weights().size(), 0.0);
    double total = 0.0;
    for (int i = 0; i <= grid.intervals(); ++i) {
        double acc = 0.0;
        for (int j = 0; j <= grid.intervals(); ++j) {
            double d = grid.point(i) - grid.point(j);
            acc += rho.weight(j) * std::exp(-d * d / (2.0 * 0.1 * 0.1));
        }
        expected[static_cast<std::size_t>(i)] = acc;
        total += acc;
    }
    for (double& w : expected) w /= total;
    CHECK(gt::max_abs_diff(out.weights(), expected) <= 1e-14);
}

TEST_CASE("zero kernels are rejected at construction") {
    CHECK_THROWS_AS(
        KernelSpec::tabulated(TabulatedCurve(1.0, {0.0, 0.0, 0.0}, TabulatedCurve::Extend::zero)),
        std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::gaussian(0.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::laplace_mix({}), std::invalid_argument);
}

TEST_CASE("posteriors stay normalized") {
    std::mt19937_64 rng(25);
    Grid grid(64, 3.0);
    LuckFunction luck = LuckFunction::sigmoid_mix(0.8);
    for (int trial = 0; trial < 50; ++trial) {
        auto post = posterior_naive(luck, gt::random_grid_dist(rng, grid, 0.3),
                                    gt::random_grid_dist(rng, grid, 0.3),
                                    MatchScore(trial % 2 == 0 ? 1.0 : 0.5));
        double sum = 0.0;
        for (double w : post.weights()) sum += w;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("opponent weight scaling cancels in the posterior") {
    std::mt19937_64 rng(26);
    Grid grid(40, 2.0);
    LuckFunction luck = LuckFunction::sigmoid_mix(0.8);
    auto pts = grid.points();
    for (double scale : {0.001, 0.37, 1000.0}) {
        auto wa = gt::random_weights(rng, pts.size());
        auto wb = gt::random_weights(rng, pts.size());
        auto base = detail::posterior_weights(luck, pts, wa, pts, wb, 1.0);
        std::vector<double> scaled_b(wb);
        for (double& w : scaled_b) w *= scale;
        auto scaled = detail::posterior_weights(luck, pts, wa, pts, scaled_b, 1.0);
        CHECK(gt::max_abs_diff(base, scaled) <= 1e-12);
    }
}

TEST_CASE("swapping the luck function complements the score") {
    std::mt19937_64 rng(27);
    Grid grid(48, 2.5);
    for (const double theta : {0.0, 0.5, 1.0, 0.3}) {
        LuckFunction luck = LuckFunction::sigmoid_mix(0.8);
        auto a = gt::random_grid_dist(rng, grid);
        auto b = gt::random_grid_dist(rng, grid);
        auto direct = posterior_naive(luck, a, b, MatchScore(theta));
        auto mirrored = posterior_naive(luck.swapped(), a, b, MatchScore(1.0 - theta));
        CHECK(gt::max_abs_diff(direct.weights(), mirrored.weights()) <= 1e-12);
    }
}

TEST_CASE("a win never shifts belief downward") {
    std::mt19937_64 rng(28);
    Grid grid(60, 3.0);
    for (const auto& luck : {LuckFunction::sigmoid_mix(0.8), LuckFunction::sigmoid_mix(1.0),
                             LuckFunction::laplace_mix(0.9, {{1.0, 1.0}})}) {
        for (int trial = 0; trial < 30; ++trial) {
            auto prior = gt::random_grid_dist(rng, grid);
            auto post = posterior_naive(luck, prior, gt::random_grid_dist(rng, grid),
                                        MatchScore::win());
            auto prior_cdf = prior.cdf();
            auto post_cdf = post.cdf();
            for (std::size_t k = 0; k < prior_cdf.size(); ++k) {
                CHECK(post_cdf[k] <= prior_cdf[k] + 1e-12);
            }
        }
    }
}

TEST_CASE("outcomes with zero total evidence raise an impossible-outcome error") {
    // A hard step sigmoid at full beta assigns zero win probability to a
    // player known to sit far below the opponent.
    auto step = LuckFunction::tabulated(
        1.0, TabulatedCurve(1.0, {0.0, 0.5, 1.0}, TabulatedCurve::Extend::hold));
    auto low = PointDistribution::from_points({0.0, 1.0}, {0.5, 0.5});
    auto high = PointDistribution::point_mass(50.0);
    CHECK_THROWS_AS(posterior_naive(step, low, high, MatchScore::win()), ImpossibleOutcomeError);
    // The complementary outcome is fine.
    CHECK_NOTHROW(posterior_naive(step, low, high, MatchScore::loss()));
}
