#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gridrate/engine.hpp"
#include "gridrate/store.hpp"

namespace gridrate {

// ---------------------------------------------------------------------------
// Batch ingestion

struct ProcessStats {
    std::size_t processed = 0;
    std::size_t skipped_lines = 0;
    std::size_t duplicate_match_ids = 0;
    double elapsed_seconds = 0.0;

    double matches_per_second() const;
};

/// Runs every event through the store in log order. Duplicate match ids are
/// processed anyway (ids are labels, not keys) and counted.
ProcessStats process_log(RatingStore& store, const Engine& engine,
                         std::span<const MatchEvent> events);

// ---------------------------------------------------------------------------
// Log-loss evaluation

struct MatchLoss {
    std::string match_id;
    double rating_diff = 0.0;  // display units, A minus B, at prediction time
    double predicted_p = 0.0;  // expected score of A before the update
    double loss = 0.0;         // -theta log p - (1-theta) log(1-p)
    double theta = 0.0;
    bool draw = false;  // theta strictly between 0 and 1
};

struct LogLossReport {
    std::vector<MatchLoss> included;
    std::size_t processed = 0;
    std::size_t excluded_variance = 0;
    std::size_t excluded_burn_in = 0;
    std::size_t included_draws = 0;

    std::size_t included_count() const { return included.size(); }
    std::size_t excluded_count() const { return excluded_variance + excluded_burn_in; }
    double total_loss() const;
    double average_loss() const;           // all included matches
    double average_loss_decisive() const;  // wins and losses only
    double average_loss_draws() const;     // draws only
};

/// Walk-forward evaluation: for each match, the prediction is recorded
/// strictly before that match's update is applied. A match enters the
/// report only when it is past the burn-in prefix and both players'
/// display-unit deviation is below var_cap at prediction time.
LogLossReport walk_forward_logloss(RatingStore& store, const Engine& engine,
                                   std::span<const MatchEvent> events,
                                   std::size_t burn_in = 0);

struct DensityCurve {
    std::vector<double> x;  // absolute rating difference, display units
    std::vector<double> y;

    /// Trapezoid integral over the curve's own grid.
    double integral() const;
};

/// Smoothed per-rating-difference contribution to the total log loss:
/// each match contributes loss * gaussian(x - |diff|; sigma) divided by the
/// kernel's half-line integral, and the whole curve is scaled to integrate
/// to the average log loss.
DensityCurve loss_density(const LogLossReport& report, double kernel_sigma = 5.0,
                          double step = 1.0);

// ---------------------------------------------------------------------------
// Posterior mean-shift curve

/// Parameters for the mean-shift table: a normal belief N(m, sigma^2) in
/// display units beats a fixed opponent, and we tabulate the resulting
/// change of the posterior mean as a function of m.
struct CurveSpec {
    double beta = 0.8;
    double sigma = 50.0;            // display units
    double opponent = 2000.0;       // display units
    double m_min = 0.0;
    double m_max = 4000.0;
    double m_step = 10.0;
    std::size_t min_nodes = 4001;   // quadrature nodes over m +- 8 sigma
};

/// Mean shift at a single m, refined by node doubling until two successive
/// evaluations agree within 1e-6.
double mean_shift(const CurveSpec& spec, double m);

struct CurvePoint {
    double m;
    double shift;
};

std::vector<CurvePoint> mean_shift_curve(const CurveSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic data

enum class PairingPolicy {
    uniform,   // opponents drawn uniformly
    adjacent,  // opponents drawn from a window of nearby true-strength ranks
};

enum class StrengthLayout {
    normal,  // true strengths drawn from N(0, sigma0^2)
    ladder,  // equally spaced true strengths centered at zero
};

struct SynthSpec {
    int players = 100;
    std::int64_t matches = 10000;
    double beta = 0.8;
    double sigma0 = 0.7;
    std::uint64_t seed = 1;
    PairingPolicy pairing = PairingPolicy::uniform;
    int pairing_window = 10;  // adjacent policy only
    StrengthLayout layout = StrengthLayout::normal;
    double ladder_spacing = 0.25;  // ladder layout only
};

/// Writes a reproducible match log drawn from the outcome model (A beats B
/// with probability Lambda(x_A, x_B) at fixed true strengths) and a sidecar
/// table of the true strengths. Identical bytes for identical specs.
void synth_log(const SynthSpec& spec, std::ostream& log_out, std::ostream& truth_out);

// ---------------------------------------------------------------------------
// Leaderboard

struct LeaderboardRow {
    std::string player_id;
    double rating = 0.0;
    double deviation = 0.0;
    std::int64_t matches = 0;
};

/// Players with at least min_matches, sorted by rating descending with ties
/// broken by lower deviation and then id. top_k <= 0 returns all rows.
std::vector<LeaderboardRow> leaderboard(const RatingStore& store, int top_k,
                                        std::int64_t min_matches);

}  // namespace gridrate
