#include "gridrate/store.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridrate/errors.hpp"
#include "internal_util.hpp"

namespace gridrate {

namespace {

using nlohmann::json;

constexpr double kLoadSumTolerance = 1e-6;

std::string format_weight(double w) {
    char buf[32];
    int len = std::snprintf(buf, sizeof(buf), "%.17g", w);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string shortest_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string quote(const std::string& s) { return json(s).dump(); }

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw IntegrityError("store line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

RatingStore::RatingStore(SystemConfig config) : config_(std::move(config)) {
    config_.validate();
}

bool RatingStore::contains(const std::string& player_id) const {
    return players_.find(player_id) != players_.end();
}

const PlayerRecord* RatingStore::find(const std::string& player_id) const {
    auto it = players_.find(player_id);
    return it == players_.end() ? nullptr : &it->second;
}

void RatingStore::check_record(const PlayerRecord& record) const {
    if (record.belief.grid() != config_.grid()) {
        throw IntegrityError("player '" + record.player_id +
                             "' has a belief on an incompatible grid");
    }
    double sum = util::kahan_sum(record.belief.weights());
    if (std::abs(sum - 1.0) > kLoadSumTolerance) {
        throw IntegrityError("player '" + record.player_id + "' has corrupted weights (sum " +
                             std::to_string(sum) + ")");
    }
}

const PlayerRecord& RatingStore::get_or_create(const std::string& player_id) {
    if (player_id.empty()) throw DataError("player id is empty");
    auto it = players_.find(player_id);
    if (it != players_.end()) {
        check_record(it->second);
        return it->second;
    }
    PlayerRecord record{player_id, default_prior(config_.grid(), config_.sigma0), 0, 0,
                        kStoreSchemaVersion};
    auto [pos, inserted] = players_.emplace(player_id, std::move(record));
    return pos->second;
}

void RatingStore::insert_unchecked(PlayerRecord record) {
    std::string id = record.player_id;
    players_.insert_or_assign(std::move(id), std::move(record));
}

std::pair<const PlayerRecord*, const PlayerRecord*> RatingStore::process_match(
    const MatchEvent& event, const Engine& engine) {
    if (event.player_a == event.player_b) {
        throw DataError("match '" + event.match_id + "' pairs player '" + event.player_a +
                        "' with itself");
    }
    if (!(event.score >= 0.0 && event.score <= 1.0)) {
        throw DataError("match '" + event.match_id + "' has score outside [0, 1]");
    }
    if (engine.grid() != config_.grid()) {
        throw IntegrityError("engine grid does not match the store configuration");
    }
    const PlayerRecord& rec_a = get_or_create(event.player_a);
    const PlayerRecord& rec_b = get_or_create(event.player_b);

    // Both posteriors come from the two pre-match beliefs; nothing is
    // committed until both new records exist.
    auto [belief_a, belief_b] =
        engine.match_update(rec_a.belief, rec_b.belief, MatchScore(event.score));

    PlayerRecord next_a{event.player_a, std::move(belief_a), rec_a.matches_played + 1,
                        event.timestamp_ms, kStoreSchemaVersion};
    PlayerRecord next_b{event.player_b, std::move(belief_b), rec_b.matches_played + 1,
                        event.timestamp_ms, kStoreSchemaVersion};
    auto a_it = players_.insert_or_assign(event.player_a, std::move(next_a)).first;
    auto b_it = players_.insert_or_assign(event.player_b, std::move(next_b)).first;
    return {&a_it->second, &b_it->second};
}

void RatingStore::save(std::ostream& out) const {
    out << "{\"schema\": " << kStoreSchemaVersion << ", \"n\": " << config_.n
        << ", \"m\": " << shortest_double(config_.half_width)
        << ", \"beta\": " << shortest_double(config_.beta)
        << ", \"sigma0\": " << shortest_double(config_.sigma0)
        << ", \"sigma_kappa\": " << shortest_double(config_.sigma_kappa) << "}\n";
    for (const auto& [id, record] : players_) {
        out << "{\"id\": " << quote(id) << ", \"matches\": " << record.matches_played
            << ", \"last\": " << record.last_update_ms << ", \"w\": [";
        auto weights = record.belief.weights();
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (k != 0) out << ", ";
            out << format_weight(weights[k]);
        }
        out << "]}\n";
    }
}

void RatingStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open store file for writing: " + path.string());
    save(out);
    out.flush();
    if (!out) throw DataError("failed writing store file: " + path.string());
}

RatingStore RatingStore::load(std::istream& in, const SystemConfig& runtime) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw IntegrityError("store file is empty (missing header)");
    ++line_no;
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object()) line_error(line_no, "malformed header");
    if (!header.contains("schema") || !header["schema"].is_number_integer()) {
        line_error(line_no, "header is missing the schema version");
    }
    if (header["schema"].get<int>() != kStoreSchemaVersion) {
        throw IntegrityError("unsupported store schema version " +
                             std::to_string(header["schema"].get<int>()));
    }
    for (const char* key : {"n", "m", "beta", "sigma0", "sigma_kappa"}) {
        if (!header.contains(key) || !header[key].is_number()) {
            line_error(line_no, std::string("header is missing '") + key + "'");
        }
    }

    SystemConfig config = runtime;
    config.n = header["n"].get<int>();
    config.half_width = header["m"].get<double>();
    config.beta = header["beta"].get<double>();
    config.sigma0 = header["sigma0"].get<double>();
    config.sigma_kappa = header["sigma_kappa"].get<double>();
    try {
        config.validate();
    } catch (const DataError& e) {
        throw IntegrityError(std::string("store header is invalid: ") + e.what());
    }

    RatingStore store(config);
    Grid grid = config.grid();
    std::size_t expected_weights = static_cast<std::size_t>(grid.size());

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) line_error(line_no, "malformed record");
        if (!rec.contains("id") || !rec["id"].is_string()) line_error(line_no, "missing id");
        if (!rec.contains("matches") || !rec["matches"].is_number_integer()) {
            line_error(line_no, "missing match count");
        }
        if (!rec.contains("last") || !rec["last"].is_number_integer()) {
            line_error(line_no, "missing last-update timestamp");
        }
        if (!rec.contains("w") || !rec["w"].is_array()) line_error(line_no, "missing weights");

        std::string id = rec["id"].get<std::string>();
        if (id.empty()) line_error(line_no, "empty player id");
        if (store.contains(id)) line_error(line_no, "duplicate player '" + id + "'");
        std::int64_t matches = rec["matches"].get<std::int64_t>();
        if (matches < 0) line_error(line_no, "negative match count");

        const json& warr = rec["w"];
        if (warr.size() != expected_weights) {
            line_error(line_no, "expected " + std::to_string(expected_weights) +
                                    " weights, found " + std::to_string(warr.size()));
        }
        std::vector<double> weights;
        weights.reserve(expected_weights);
        for (const json& v : warr) {
            if (!v.is_number()) line_error(line_no, "non-numeric weight");
            double w = v.get<double>();
            if (!std::isfinite(w) || w < 0.0) line_error(line_no, "invalid weight value");
            weights.push_back(w);
        }
        double sum = util::kahan_sum(weights);
        if (std::abs(sum - 1.0) > kLoadSumTolerance) {
            line_error(line_no, "weights sum to " + std::to_string(sum) +
                                    ", expected 1 within " + std::to_string(kLoadSumTolerance));
        }
        PlayerRecord record{std::move(id),
                            GridDistribution::restore_weights(grid, std::move(weights),
                                                              kLoadSumTolerance),
                            matches, rec["last"].get<std::int64_t>(), kStoreSchemaVersion};
        store.insert_unchecked(std::move(record));
    }
    return store;
}

RatingStore RatingStore::load(const std::filesystem::path& path, const SystemConfig& runtime) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open store file: " + path.string());
    return load(in, runtime);
}

// ---------------------------------------------------------------------------
// Match logs

namespace {

bool parse_match_line(const json& obj, MatchEvent& out, std::string& why) {
    if (!obj.is_object()) {
        why = "not an object";
        return false;
    }
    if (!obj.contains("id") || !obj["id"].is_string()) {
        why = "missing string field 'id'";
        return false;
    }
    if (!obj.contains("ts") || !obj["ts"].is_number_integer()) {
        why = "missing integer field 'ts'";
        return false;
    }
    if (!obj.contains("a") || !obj["a"].is_string() || !obj.contains("b") ||
        !obj["b"].is_string()) {
        why = "missing string fields 'a'/'b'";
        return false;
    }
    if (!obj.contains("score") || !obj["score"].is_number()) {
        why = "missing numeric field 'score'";
        return false;
    }
    double score = obj["score"].get<double>();
    if (!(score >= 0.0 && score <= 1.0)) {
        why = "score outside [0, 1]";
        return false;
    }
    out.match_id = obj["id"].get<std::string>();
    out.timestamp_ms = obj["ts"].get<std::int64_t>();
    out.player_a = obj["a"].get<std::string>();
    out.player_b = obj["b"].get<std::string>();
    out.score = score;
    if (out.player_a.empty() || out.player_b.empty()) {
        why = "empty player id";
        return false;
    }
    if (out.player_a == out.player_b) {
        why = "players are identical";
        return false;
    }
    return true;
}

}  // namespace

MatchLog read_match_log(std::istream& in, ParseMode mode) {
    MatchLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        json obj = json::parse(line, nullptr, false);
        MatchEvent event;
        std::string why;
        if (obj.is_discarded()) why = "not valid JSON";
        if (!why.empty() || !parse_match_line(obj, event, why)) {
            if (mode == ParseMode::strict) {
                throw DataError("match log line " + std::to_string(line_no) + ": " + why);
            }
            ++log.skipped_lines;
            continue;
        }
        log.events.push_back(std::move(event));
    }
    return log;
}

MatchLog read_match_log(const std::filesystem::path& path, ParseMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open match log: " + path.string());
    return read_match_log(in, mode);
}

}  // namespace gridrate
