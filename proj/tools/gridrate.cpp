// gridrate command-line front end: store management, batch ingestion,
// prediction, leaderboards, walk-forward log-loss evaluation, mean-shift
// curves, and synthetic data generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridrate/errors.hpp"
#include "gridrate/evalkit.hpp"
#include "gridrate/store.hpp"

namespace fs = std::filesystem;
using namespace gridrate;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIntegrity = 3;

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct GlobalOptions {
    std::string config_path;
    std::string store_path;
    std::string engine_name;
    bool lenient = false;
};

SystemConfig effective_config(const GlobalOptions& opts) {
    SystemConfig config;
    if (!opts.config_path.empty()) config = parse_config_file(opts.config_path);
    if (!opts.engine_name.empty()) config.engine = parse_engine_kind(opts.engine_name);
    config.validate();
    return config;
}

RatingStore load_store(const GlobalOptions& opts, const SystemConfig& runtime) {
    if (opts.store_path.empty()) throw DataError("this command needs --store PATH");
    RatingStore store = RatingStore::load(opts.store_path, runtime);
    if (!opts.config_path.empty() && !store.config().same_model(runtime)) {
        throw IntegrityError(
            "config file model parameters (beta/n/half_width/sigma0/sigma_kappa) do not match "
            "the store header");
    }
    return store;
}

void save_store(const RatingStore& store, const std::string& path) {
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    store.save(tmp);
    fs::rename(tmp, target);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    return out;
}

// ---------------------------------------------------------------------------

int cmd_init(const GlobalOptions& opts, bool force) {
    if (opts.store_path.empty()) throw DataError("init needs --store PATH");
    if (!force && fs::exists(opts.store_path)) {
        throw DataError("store file already exists (use --force to overwrite): " +
                        opts.store_path);
    }
    SystemConfig config = effective_config(opts);
    RatingStore store(config);
    save_store(store, opts.store_path);
    std::cout << "# field\tvalue\n";
    std::cout << "store\t" << opts.store_path << '\n';
    std::cout << "engine\t" << engine_kind_name(config.engine) << '\n';
    std::cout << "players\t0\n";
    return kExitOk;
}

int cmd_process(const GlobalOptions& opts, const std::string& matches_path) {
    SystemConfig runtime = effective_config(opts);
    RatingStore store = load_store(opts, runtime);
    MatchLog log = read_match_log(matches_path,
                                  opts.lenient ? ParseMode::lenient : ParseMode::strict);
    auto engine = make_engine(store.config());
    ProcessStats stats = process_log(store, *engine, log.events);
    save_store(store, opts.store_path);

    std::cout << "# field\tvalue\n";
    std::cout << "processed\t" << stats.processed << '\n';
    std::cout << "skipped_lines\t" << log.skipped_lines << '\n';
    std::cout << "duplicate_match_ids\t" << stats.duplicate_match_ids << '\n';
    std::cout << "players\t" << store.size() << '\n';
    std::cout << "elapsed_seconds\t" << num(stats.elapsed_seconds) << '\n';
    std::cout << "matches_per_second\t" << num(stats.matches_per_second()) << '\n';
    return kExitOk;
}

int cmd_predict(const GlobalOptions& opts, const std::string& id_a, const std::string& id_b) {
    SystemConfig runtime = effective_config(opts);
    RatingStore store = load_store(opts, runtime);
    const PlayerRecord* a = store.find(id_a);
    const PlayerRecord* b = store.find(id_b);
    if (a == nullptr) throw DataError("unknown player: " + id_a);
    if (b == nullptr) throw DataError("unknown player: " + id_b);

    auto engine = make_engine(store.config());
    double p = id_a == id_b ? 0.5 : engine->predict(a->belief, b->belief);
    DisplayTransform transform = store.config().display();
    DisplayRating ra = display_rating(transform, a->belief);
    DisplayRating rb = display_rating(transform, b->belief);

    std::cout << "# player_a\tplayer_b\tp_a_beats_b\n";
    std::cout << id_a << '\t' << id_b << '\t' << num(p) << '\n';
    std::cout << "# player\trating\tdeviation\tmatches\n";
    std::cout << id_a << '\t' << num(ra.rating) << '\t' << num(ra.deviation) << '\t'
              << a->matches_played << '\n';
    std::cout << id_b << '\t' << num(rb.rating) << '\t' << num(rb.deviation) << '\t'
              << b->matches_played << '\n';
    return kExitOk;
}

int cmd_leaderboard(const GlobalOptions& opts, int top_k, std::int64_t min_matches) {
    SystemConfig runtime = effective_config(opts);
    RatingStore store = load_store(opts, runtime);
    auto rows = leaderboard(store, top_k, min_matches);
    std::cout << "# rank\tplayer\trating\tdeviation\tmatches\n";
    std::size_t rank = 1;
    for (const LeaderboardRow& row : rows) {
        std::cout << rank++ << '\t' << row.player_id << '\t' << num(row.rating) << '\t'
                  << num(row.deviation) << '\t' << row.matches << '\n';
    }
    return kExitOk;
}

int cmd_logloss(const GlobalOptions& opts, const std::string& matches_path,
                std::int64_t burn_in, double burn_in_frac, const std::string& per_match_path,
                const std::string& density_path, double density_step) {
    SystemConfig runtime = effective_config(opts);
    std::optional<RatingStore> store;
    if (!opts.store_path.empty() && fs::exists(opts.store_path)) {
        store.emplace(load_store(opts, runtime));
    } else {
        store.emplace(runtime);
    }
    if (burn_in < 0) throw DataError("--burnin must be non-negative");
    if (burn_in_frac < 0.0 || burn_in_frac > 1.0) {
        throw DataError("--burnin-frac must lie in [0, 1]");
    }
    MatchLog log = read_match_log(matches_path,
                                  opts.lenient ? ParseMode::lenient : ParseMode::strict);
    std::size_t burn = static_cast<std::size_t>(burn_in);
    if (burn_in_frac > 0.0) {
        burn = static_cast<std::size_t>(burn_in_frac * static_cast<double>(log.events.size()));
    }
    auto engine = make_engine(store->config());
    LogLossReport report = walk_forward_logloss(*store, *engine, log.events, burn);

    if (!per_match_path.empty()) {
        auto out = open_out(per_match_path);
        out << "# match_id\trating_diff\tpredicted_p\tlogloss\ttheta\n";
        for (const MatchLoss& m : report.included) {
            out << m.match_id << '\t' << num(m.rating_diff) << '\t' << num(m.predicted_p)
                << '\t' << num(m.loss) << '\t' << num(m.theta) << '\n';
        }
    }
    if (!density_path.empty()) {
        DensityCurve curve = loss_density(report, 5.0, density_step);
        auto out = open_out(density_path);
        out << "# rating_diff\tloss_density\n";
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            out << num(curve.x[i]) << '\t' << num(curve.y[i]) << '\n';
        }
    }

    std::cout << "# field\tvalue\n";
    std::cout << "processed\t" << report.processed << '\n';
    std::cout << "included\t" << report.included_count() << '\n';
    std::cout << "excluded_variance\t" << report.excluded_variance << '\n';
    std::cout << "excluded_burnin\t" << report.excluded_burn_in << '\n';
    std::cout << "included_draws\t" << report.included_draws << '\n';
    std::cout << "average_logloss\t" << num(report.average_loss()) << '\n';
    std::cout << "average_logloss_decisive\t" << num(report.average_loss_decisive()) << '\n';
    std::cout << "average_logloss_draws\t" << num(report.average_loss_draws()) << '\n';
    return kExitOk;
}

int cmd_curve(const CurveSpec& spec, const std::string& out_path) {
    auto points = mean_shift_curve(spec);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        out = &file;
    }
    *out << "# m\tmean_shift\n";
    for (const CurvePoint& p : points) {
        *out << num(p.m) << '\t' << num(p.shift) << '\n';
    }
    return kExitOk;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_path,
              const std::string& truth_path) {
    auto log = open_out(out_path);
    std::string truth_target = truth_path.empty() ? out_path + ".truth.tsv" : truth_path;
    auto truth = open_out(truth_target);
    synth_log(spec, log, truth);
    std::cout << "# field\tvalue\n";
    std::cout << "matches\t" << spec.matches << '\n';
    std::cout << "players\t" << spec.players << '\n';
    std::cout << "log\t" << out_path << '\n';
    std::cout << "truth\t" << truth_target << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridrate: a Bayesian paired-comparison rating engine on discretized strength "
                 "distributions"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "key=value config file");
    app.add_option("--store", opts.store_path, "player store file");
    app.add_option("--engine", opts.engine_name, "computational engine")
        ->check(CLI::IsMember({"naive", "fft", "laplace"}));
    bool strict_flag = false;
    app.add_flag("--strict", strict_flag, "abort on malformed log lines (default)");
    app.add_flag("--lenient", opts.lenient, "skip and count malformed log lines");

    auto* init = app.add_subcommand("init", "create a fresh store");
    bool force = false;
    init->add_flag("--force", force, "overwrite an existing store");

    auto* process = app.add_subcommand("process", "ingest a match log into the store");
    std::string matches_path;
    process->add_option("--matches", matches_path, "line-delimited match log")->required();

    auto* predict = app.add_subcommand("predict", "expected score of A against B");
    std::string id_a, id_b;
    predict->add_option("a", id_a, "first player id")->required();
    predict->add_option("b", id_b, "second player id")->required();

    auto* board = app.add_subcommand("leaderboard", "rank players by display rating");
    int top_k = 0;
    std::int64_t min_matches = 0;
    board->add_option("--top", top_k, "keep only the first K rows");
    board->add_option("--min-matches", min_matches, "minimum processed matches");

    auto* logloss = app.add_subcommand("logloss", "walk-forward log-loss evaluation");
    std::string ll_matches, per_match_path, density_path;
    std::int64_t burn_in = 0;
    double burn_in_frac = 0.0;
    double density_step = 1.0;
    logloss->add_option("--matches", ll_matches, "line-delimited match log")->required();
    logloss->add_option("--burnin", burn_in, "matches excluded from the report at the start");
    logloss->add_option("--burnin-frac", burn_in_frac,
                        "burn-in as a fraction of the log (overrides --burnin)");
    logloss->add_option("--per-match", per_match_path, "write per-match records here");
    logloss->add_option("--density", density_path, "write the smoothed loss density here");
    logloss->add_option("--density-step", density_step, "density grid step in rating points");

    auto* curve = app.add_subcommand("curve", "posterior mean-shift table for a normal belief");
    CurveSpec curve_spec;
    std::string curve_out;
    curve->add_option("--beta", curve_spec.beta, "luck weight in [0, 1]");
    curve->add_option("--sigma", curve_spec.sigma, "belief deviation, display units");
    curve->add_option("--opponent", curve_spec.opponent, "opponent rating, display units");
    curve->add_option("--m-min", curve_spec.m_min, "first mean");
    curve->add_option("--m-max", curve_spec.m_max, "last mean");
    curve->add_option("--m-step", curve_spec.m_step, "mean step");
    curve->add_option("--nodes", curve_spec.min_nodes, "minimum quadrature nodes");
    curve->add_option("--out", curve_out, "output path (default stdout)");

    auto* synth = app.add_subcommand("synth", "generate a reproducible synthetic match log");
    SynthSpec synth_spec;
    std::string synth_out, synth_truth, pairing = "uniform", layout = "normal";
    synth->add_option("--players", synth_spec.players, "population size")->required();
    synth->add_option("--matches", synth_spec.matches, "number of matches")->required();
    synth->add_option("--beta", synth_spec.beta, "luck weight of the outcome model");
    synth->add_option("--sigma0", synth_spec.sigma0, "strength spread (normal layout)");
    synth->add_option("--seed", synth_spec.seed, "RNG seed; fixes all randomness");
    synth->add_option("--pairing", pairing, "opponent choice")
        ->check(CLI::IsMember({"uniform", "adjacent"}));
    synth->add_option("--window", synth_spec.pairing_window, "rank window (adjacent pairing)");
    synth->add_option("--layout", layout, "true-strength layout")
        ->check(CLI::IsMember({"normal", "ladder"}));
    synth->add_option("--spacing", synth_spec.ladder_spacing, "rung gap (ladder layout)");
    synth->add_option("--out", synth_out, "match log output path")->required();
    synth->add_option("--truth", synth_truth, "sidecar path (default <out>.truth.tsv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (init->parsed()) return cmd_init(opts, force);
        if (process->parsed()) return cmd_process(opts, matches_path);
        if (predict->parsed()) return cmd_predict(opts, id_a, id_b);
        if (board->parsed()) return cmd_leaderboard(opts, top_k, min_matches);
        if (logloss->parsed()) {
            return cmd_logloss(opts, ll_matches, burn_in, burn_in_frac, per_match_path,
                               density_path, density_step);
        }
        if (curve->parsed()) return cmd_curve(curve_spec, curve_out);
        if (synth->parsed()) {
            synth_spec.pairing =
                pairing == "adjacent" ? PairingPolicy::adjacent : PairingPolicy::uniform;
            synth_spec.layout =
                layout == "ladder" ? StrengthLayout::ladder : StrengthLayout::normal;
            return cmd_synth(synth_spec, synth_out, synth_truth);
        }
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return kExitIntegrity;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ImpossibleOutcomeError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitIntegrity;
    }
}
