#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridrate/config.hpp"
#include "gridrate/engine.hpp"
#include "gridrate/grid.hpp"

namespace gridrate {

inline constexpr int kStoreSchemaVersion = 1;

/// Persistent per-player state: the belief plus bookkeeping.
struct PlayerRecord {
    std::string player_id;
    GridDistribution belief;
    std::int64_t matches_played = 0;
    std::int64_t last_update_ms = 0;
    int schema_version = kStoreSchemaVersion;
};

/// One ingested match: `score` is player A's result (1 = A wins, 0 = B
/// wins, 1/2 = draw; any value in [0, 1]).
struct MatchEvent {
    std::string match_id;
    std::int64_t timestamp_ms = 0;
    std::string player_a;
    std::string player_b;
    double score = 0.0;
};

/// In-memory player table with line-delimited persistence. Beliefs are
/// created lazily from the configured prior on first appearance. Single
/// logical writer; reads of a settled store are unrestricted.
class RatingStore {
public:
    explicit RatingStore(SystemConfig config);

    const SystemConfig& config() const { return config_; }
    std::size_t size() const { return players_.size(); }
    bool contains(const std::string& player_id) const;
    const PlayerRecord* find(const std::string& player_id) const;

    /// Existing record (integrity-checked), or a fresh one seeded with the
    /// default prior. The reference is invalidated by the next mutation.
    const PlayerRecord& get_or_create(const std::string& player_id);

    /// Applies one match: both posteriors from the two pre-match beliefs,
    /// then the drift step, committed atomically for the pair. On error the
    /// store is left exactly as it was.
    std::pair<const PlayerRecord*, const PlayerRecord*> process_match(const MatchEvent& event,
                                                                      const Engine& engine);

    /// Inserts a record without validation. Used by the load path after its
    /// own checks; get_or_create re-validates on access.
    void insert_unchecked(PlayerRecord record);

    /// Players in id order (the persistence order).
    const std::map<std::string, PlayerRecord>& players() const { return players_; }

    void save(const std::filesystem::path& path) const;
    void save(std::ostream& out) const;

    /// Loads a snapshot; model parameters come from the file header and the
    /// remaining settings from `runtime`, which must agree with the header
    /// on any model field it shares.
    static RatingStore load(const std::filesystem::path& path, const SystemConfig& runtime);
    static RatingStore load(std::istream& in, const SystemConfig& runtime);

private:
    void check_record(const PlayerRecord& record) const;

    SystemConfig config_;
    std::map<std::string, PlayerRecord> players_;
};

enum class ParseMode { strict, lenient };

struct MatchLog {
    std::vector<MatchEvent> events;
    std::size_t skipped_lines = 0;  // lenient mode only
};

/// Reads a line-delimited match log: one object per line with fields
/// id, ts, a, b, score; '#' lines and blank lines are ignored. In strict
/// mode a malformed line raises DataError naming the line number; in
/// lenient mode it is counted and skipped.
MatchLog read_match_log(const std::filesystem::path& path, ParseMode mode);
MatchLog read_match_log(std::istream& in, ParseMode mode);

}  // namespace gridrate
