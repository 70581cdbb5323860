#include "gridrate/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "gridrate/errors.hpp"
#include "internal_util.hpp"

namespace gridrate {

double ProcessStats::matches_per_second() const {
    if (elapsed_seconds <= 0.0) return 0.0;
    return static_cast<double>(processed) / elapsed_seconds;
}

ProcessStats process_log(RatingStore& store, const Engine& engine,
                         std::span<const MatchEvent> events) {
    ProcessStats stats;
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(events.size());
    auto start = std::chrono::steady_clock::now();
    for (const MatchEvent& event : events) {
        if (!seen_ids.insert(event.match_id).second) ++stats.duplicate_match_ids;
        store.process_match(event, engine);
        ++stats.processed;
    }
    auto end = std::chrono::steady_clock::now();
    stats.elapsed_seconds = std::chrono::duration<double>(end - start).count();
    return stats;
}

// ---------------------------------------------------------------------------
// Log loss

double LogLossReport::total_loss() const {
    util::KahanAccumulator acc;
    for (const MatchLoss& m : included) acc.add(m.loss);
    return acc.value();
}

double LogLossReport::average_loss() const {
    if (included.empty()) return 0.0;
    return total_loss() / static_cast<double>(included.size());
}

double LogLossReport::average_loss_decisive() const {
    util::KahanAccumulator acc;
    std::size_t count = 0;
    for (const MatchLoss& m : included) {
        if (m.draw) continue;
        acc.add(m.loss);
        ++count;
    }
    return count == 0 ? 0.0 : acc.value() / static_cast<double>(count);
}

double LogLossReport::average_loss_draws() const {
    util::KahanAccumulator acc;
    std::size_t count = 0;
    for (const MatchLoss& m : included) {
        if (!m.draw) continue;
        acc.add(m.loss);
        ++count;
    }
    return count == 0 ? 0.0 : acc.value() / static_cast<double>(count);
}

LogLossReport walk_forward_logloss(RatingStore& store, const Engine& engine,
                                   std::span<const MatchEvent> events, std::size_t burn_in) {
    LogLossReport report;
    report.included.reserve(events.size() > burn_in ? events.size() - burn_in : 0);
    const DisplayTransform transform = store.config().display();
    const double var_cap = store.config().var_cap;

    for (std::size_t index = 0; index < events.size(); ++index) {
        const MatchEvent& event = events[index];
        ++report.processed;

        if (index < burn_in) {
            ++report.excluded_burn_in;
            store.process_match(event, engine);
            continue;
        }

        // Prediction strictly precedes this match's update.
        const PlayerRecord& rec_a = store.get_or_create(event.player_a);
        const PlayerRecord& rec_b = store.get_or_create(event.player_b);
        DisplayRating disp_a = display_rating(transform, rec_a.belief);
        DisplayRating disp_b = display_rating(transform, rec_b.belief);
        bool reportable = disp_a.deviation < var_cap && disp_b.deviation < var_cap;
        if (reportable) {
            double p = engine.predict(rec_a.belief, rec_b.belief);
            double theta = event.score;
            double loss;
            if (theta == 1.0) {
                loss = -std::log(p);
            } else if (theta == 0.0) {
                loss = -std::log(1.0 - p);
            } else {
                loss = -theta * std::log(p) - (1.0 - theta) * std::log(1.0 - p);
            }
            bool draw = theta != 0.0 && theta != 1.0;
            if (draw) ++report.included_draws;
            report.included.push_back(
                {event.match_id, disp_a.rating - disp_b.rating, p, loss, theta, draw});
        } else {
            ++report.excluded_variance;
        }
        store.process_match(event, engine);
    }
    return report;
}

double DensityCurve::integral() const {
    double total = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        total += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    return total;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Kernel-density sum over matches within a +-10 sigma window of x.
class LossSmoother {
public:
    LossSmoother(const LogLossReport& report, double sigma) : sigma_(sigma) {
        points_.reserve(report.included.size());
        for (const MatchLoss& m : report.included) {
            points_.push_back({std::abs(m.rating_diff), m.loss});
        }
        std::sort(points_.begin(), points_.end());
        norm_ = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    }

    double max_diff() const { return points_.empty() ? 0.0 : points_.back().first; }

    double operator()(double x) const {
        double lo = x - 10.0 * sigma_;
        double hi = x + 10.0 * sigma_;
        auto begin = std::lower_bound(points_.begin(), points_.end(), std::make_pair(lo, 0.0));
        double inv_two_var = 1.0 / (2.0 * sigma_ * sigma_);
        util::KahanAccumulator acc;
        for (auto it = begin; it != points_.end() && it->first <= hi; ++it) {
            double d = x - it->first;
            acc.add(it->second * std::exp(-d * d * inv_two_var));
        }
        // Boundary correction: the kernel is renormalized by its mass on the
        // half line of admissible rating differences.
        return acc.value() * norm_ / normal_cdf(x / sigma_);
    }

private:
    double sigma_;
    double norm_;
    std::vector<std::pair<double, double>> points_;
};

}  // namespace

DensityCurve loss_density(const LogLossReport& report, double kernel_sigma, double step) {
    if (!(kernel_sigma > 0.0) || !(step > 0.0)) {
        throw std::invalid_argument("density kernel sigma and step must be positive");
    }
    DensityCurve curve;
    if (report.included.empty()) return curve;

    LossSmoother smoother(report, kernel_sigma);
    double max_x = smoother.max_diff() + 4.0 * kernel_sigma;
    std::size_t coarse = static_cast<std::size_t>(std::ceil(max_x / step)) + 1;

    // Raw curve on a refined grid; the coarse output is every refine-th
    // point, so normalizing against the fine trapezoid leaves an honest
    // discretization residue in the emitted curve's own integral.
    constexpr std::size_t refine = 8;
    std::size_t fine = (coarse - 1) * refine + 1;
    std::vector<double> fine_y(fine);
    double fine_step = step / static_cast<double>(refine);
    for (std::size_t i = 0; i < fine; ++i) {
        fine_y[i] = smoother(static_cast<double>(i) * fine_step);
    }
    double fine_integral = 0.0;
    for (std::size_t i = 1; i < fine; ++i) {
        fine_integral += 0.5 * (fine_y[i] + fine_y[i - 1]) * fine_step;
    }
    if (fine_integral <= 0.0) throw Error("loss density integrates to zero");
    double scale = report.average_loss() / fine_integral;

    curve.x.resize(coarse);
    curve.y.resize(coarse);
    for (std::size_t i = 0; i < coarse; ++i) {
        curve.x[i] = static_cast<double>(i) * step;
        curve.y[i] = scale * fine_y[i * refine];
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Posterior mean-shift curve

namespace {

// Simpson evaluation of the posterior-mean integrals for a normal belief
// N(m, sigma^2) defeating a fixed opponent, all in display units.
double mean_shift_once(const CurveSpec& spec, double m, std::size_t nodes) {
    if (nodes % 2 == 0) ++nodes;
    double a = m - 8.0 * spec.sigma;
    double b = m + 8.0 * spec.sigma;
    double h = (b - a) / static_cast<double>(nodes - 1);
    double inv_two_var = 1.0 / (2.0 * spec.sigma * spec.sigma);
    double phi_norm = 1.0 / (spec.sigma * std::sqrt(2.0 * std::numbers::pi));
    util::KahanAccumulator num;
    util::KahanAccumulator den;
    for (std::size_t i = 0; i < nodes; ++i) {
        double x = a + static_cast<double>(i) * h;
        double coeff = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        double sigmoid = 1.0 / (1.0 + std::exp((spec.opponent - x) * std::numbers::ln10 / 400.0));
        double value = coeff * sigmoid * phi_norm * std::exp(-(x - m) * (x - m) * inv_two_var);
        den.add(value);
        num.add(value * x);
    }
    double simpson = h / 3.0;
    double integral_den = simpson * den.value();
    double integral_num = simpson * num.value();
    double numerator = 0.5 * (1.0 - spec.beta) * m + spec.beta * integral_num;
    double denominator = 0.5 * (1.0 - spec.beta) + spec.beta * integral_den;
    return numerator / denominator - m;
}

}  // namespace

double mean_shift(const CurveSpec& spec, double m) {
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("curve sigma must be positive");
    if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) {
        throw std::invalid_argument("curve beta must lie in [0, 1]");
    }
    std::size_t nodes = std::max<std::size_t>(spec.min_nodes, 4001);
    double value = mean_shift_once(spec, m, nodes);
    for (int round = 0; round < 12; ++round) {
        nodes = 2 * (nodes - 1) + 1;
        double refined = mean_shift_once(spec, m, nodes);
        bool settled = std::abs(refined - value) < 1e-6;
        value = refined;
        if (settled) return value;
    }
    return value;
}

std::vector<CurvePoint> mean_shift_curve(const CurveSpec& spec) {
    if (!(spec.m_step > 0.0)) throw std::invalid_argument("curve step must be positive");
    if (spec.m_max < spec.m_min) throw std::invalid_argument("curve range is empty");
    std::vector<CurvePoint> points;
    std::size_t count = static_cast<std::size_t>((spec.m_max - spec.m_min) / spec.m_step) + 1;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        double m = spec.m_min + static_cast<double>(i) * spec.m_step;
        points.push_back({m, mean_shift(spec, m)});
    }
    return points;
}

// ---------------------------------------------------------------------------
// Synthetic logs

namespace {

// Hand-rolled draws so the byte stream is identical across platforms.
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : rng_(seed) {}

    double uniform01() {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform draw from [0, bound).
    std::size_t index(std::size_t bound) {
        return std::min(bound - 1, static_cast<std::size_t>(uniform01() *
                                                            static_cast<double>(bound)));
    }

private:
    std::mt19937_64 rng_;
};

std::string player_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%05d", index);
    return buf;
}

}  // namespace

void synth_log(const SynthSpec& spec, std::ostream& log_out, std::ostream& truth_out) {
    if (spec.players < 2) throw std::invalid_argument("need at least two players");
    if (spec.matches < 0) throw std::invalid_argument("match count must be non-negative");
    if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) {
        throw std::invalid_argument("beta must lie in [0, 1]");
    }
    if (!(spec.sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
    if (spec.pairing == PairingPolicy::adjacent && spec.pairing_window < 1) {
        throw std::invalid_argument("pairing window must be at least 1");
    }

    SynthRng rng(spec.seed);
    std::size_t count = static_cast<std::size_t>(spec.players);
    std::vector<double> strength(count);
    if (spec.layout == StrengthLayout::ladder) {
        if (!(spec.ladder_spacing > 0.0)) {
            throw std::invalid_argument("ladder spacing must be positive");
        }
        double mid = 0.5 * static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) {
            strength[i] = (static_cast<double>(i) - mid) * spec.ladder_spacing;
        }
    } else {
        for (double& s : strength) s = spec.sigma0 * rng.normal();
    }

    // Rank table for the adjacent pairing policy.
    std::vector<std::size_t> by_rank(count);
    for (std::size_t i = 0; i < count; ++i) by_rank[i] = i;
    std::sort(by_rank.begin(), by_rank.end(),
              [&](std::size_t a, std::size_t b) { return strength[a] < strength[b]; });
    std::vector<std::size_t> rank_of(count);
    for (std::size_t r = 0; r < count; ++r) rank_of[by_rank[r]] = r;

    DisplayTransform transform;
    truth_out << "# player_id\tstrength\trating\n";
    char buf[64];
    for (std::size_t i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g", strength[i]);
        std::string s_str = buf;
        std::snprintf(buf, sizeof(buf), "%.10g", transform.rating(strength[i]));
        truth_out << player_name(static_cast<int>(i)) << '\t' << s_str << '\t' << buf << '\n';
    }

    constexpr std::int64_t kBaseTimestamp = 1700000000000;
    for (std::int64_t match = 0; match < spec.matches; ++match) {
        std::size_t a = rng.index(count);
        std::size_t b;
        if (spec.pairing == PairingPolicy::uniform) {
            b = (a + 1 + rng.index(count - 1)) % count;
        } else {
            std::size_t rank_a = rank_of[a];
            std::size_t w = static_cast<std::size_t>(spec.pairing_window);
            std::size_t lo = rank_a > w ? rank_a - w : 0;
            std::size_t hi = std::min(count - 1, rank_a + w);
            std::size_t pick = rng.index(hi - lo);  // window minus the player itself
            std::size_t rank_b = lo + pick;
            if (rank_b >= rank_a) ++rank_b;
            b = by_rank[rank_b];
        }
        double p = 0.5 * (1.0 - spec.beta) +
                   spec.beta / (1.0 + std::exp(strength[b] - strength[a]));
        int score = rng.uniform01() < p ? 1 : 0;
        std::snprintf(buf, sizeof(buf), "m%08lld", static_cast<long long>(match));
        log_out << "{\"id\": \"" << buf << "\", \"ts\": " << (kBaseTimestamp + match * 1000)
                << ", \"a\": \"" << player_name(static_cast<int>(a)) << "\", \"b\": \""
                << player_name(static_cast<int>(b)) << "\", \"score\": " << score << "}\n";
    }
}

// ---------------------------------------------------------------------------
// Leaderboard

std::vector<LeaderboardRow> leaderboard(const RatingStore& store, int top_k,
                                        std::int64_t min_matches) {
    const DisplayTransform transform = store.config().display();
    std::vector<LeaderboardRow> rows;
    for (const auto& [id, record] : store.players()) {
        if (record.matches_played < min_matches) continue;
        DisplayRating disp = display_rating(transform, record.belief);
        rows.push_back({id, disp.rating, disp.deviation, record.matches_played});
    }
    std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
        if (a.rating != b.rating) return a.rating > b.rating;
        if (a.deviation != b.deviation) return a.deviation < b.deviation;
        return a.player_id < b.player_id;
    });
    if (top_k > 0 && rows.size() > static_cast<std::size_t>(top_k)) {
        rows.resize(static_cast<std::size_t>(top_k));
    }
    return rows;
}

}  // namespace gridrate
