#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code;
    std::string output;
};

// Runs the CLI with stdout captured and stderr folded in.
CommandResult run_cli(const fs::path& dir, const std::string& args) {
    fs::path out = dir / "cmd.out";
    std::string command = std::string(GRIDRATE_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>&1";
    int status = std::system(command.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::ostringstream text;
    text << in.rdbuf();
    return {code, text.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

struct TempDir {
    TempDir() : path(fs::temp_directory_path() /
                     ("gridrate_cli_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path path;
};

}  // namespace

TEST_CASE("full pipeline: synth, init, process, leaderboard, predict, logloss, curve") {
    TempDir dir;
    fs::path log = dir.path / "matches.jsonl";
    fs::path store = dir.path / "players.store";

    auto synth = run_cli(dir.path, "synth --players 12 --matches 300 --seed 3 --out " +
                                       log.string());
    REQUIRE(synth.exit_code == 0);
    CHECK(fs::exists(log));
    CHECK(fs::exists(dir.path / "matches.jsonl.truth.tsv"));

    // Same seed, same bytes.
    fs::path log2 = dir.path / "again.jsonl";
    run_cli(dir.path, "synth --players 12 --matches 300 --seed 3 --out " + log2.string());
    CHECK(slurp(log) == slurp(log2));

    auto init = run_cli(dir.path, "init --store " + store.string());
    REQUIRE(init.exit_code == 0);
    auto init_again = run_cli(dir.path, "init --store " + store.string());
    CHECK(init_again.exit_code == 2);  // refuses to clobber without --force

    auto process =
        run_cli(dir.path, "process --store " + store.string() + " --matches " + log.string());
    REQUIRE(process.exit_code == 0);
    CHECK(process.output.find("processed\t300") != std::string::npos);

    auto board = run_cli(dir.path, "leaderboard --store " + store.string() + " --top 3");
    REQUIRE(board.exit_code == 0);
    CHECK(board.output.find("# rank\tplayer\trating\tdeviation\tmatches") != std::string::npos);

    auto predict =
        run_cli(dir.path, "predict --store " + store.string() + " p00000 p00001");
    REQUIRE(predict.exit_code == 0);
    CHECK(predict.output.find("p_a_beats_b") != std::string::npos);

    auto logloss = run_cli(dir.path, "logloss --matches " + log.string() +
                                         " --burnin 30 --density " +
                                         (dir.path / "density.tsv").string());
    REQUIRE(logloss.exit_code == 0);
    CHECK(logloss.output.find("excluded_burnin\t30") != std::string::npos);
    CHECK(fs::exists(dir.path / "density.tsv"));

    auto curve = run_cli(dir.path, "curve --beta 0.8 --m-min 0 --m-max 100 --m-step 50");
    REQUIRE(curve.exit_code == 0);
    CHECK(curve.output.find("# m\tmean_shift") != std::string::npos);

    // An empty log is a zero-match run that leaves the store as it was.
    fs::path empty = dir.path / "empty.jsonl";
    std::ofstream(empty).close();
    std::string before = slurp(store);
    auto none =
        run_cli(dir.path, "process --store " + store.string() + " --matches " + empty.string());
    CHECK(none.exit_code == 0);
    CHECK(none.output.find("processed\t0") != std::string::npos);
    CHECK(slurp(store) == before);
}

TEST_CASE("exit codes distinguish usage, data, and integrity failures") {
    TempDir dir;
    fs::path store = dir.path / "players.store";
    fs::path log = dir.path / "log.jsonl";

    CHECK(run_cli(dir.path, "definitely-not-a-command").exit_code == 1);
    CHECK(run_cli(dir.path, "--help").exit_code == 0);
    CHECK(run_cli(dir.path, "process --matches nowhere.jsonl --store nowhere.store")
              .exit_code == 2);

    run_cli(dir.path, "init --store " + store.string());
    CHECK(run_cli(dir.path, "predict --store " + store.string() + " ghost ghoul").exit_code ==
          2);

    {
        std::ofstream out(log);
        out << "{\"id\": \"m1\", \"ts\": 1, \"a\": \"x\", \"b\": \"y\", \"score\": 1}\n";
        out << "{broken json\n";
    }
    CHECK(run_cli(dir.path,
                  "process --store " + store.string() + " --matches " + log.string())
              .exit_code == 2);  // strict mode aborts
    auto lenient = run_cli(dir.path, "process --lenient --store " + store.string() +
                                         " --matches " + log.string());
    CHECK(lenient.exit_code == 0);
    CHECK(lenient.output.find("skipped_lines\t1") != std::string::npos);

    // Tamper with a stored weight: integrity failure on the next read.
    std::string text = slurp(store);
    auto pos = text.find("\"w\": [");
    std::string tampered = text.substr(0, pos + 6) + "0.9" + text.substr(text.find(',', pos));
    {
        std::ofstream out(store, std::ios::binary);
        out << tampered;
    }
    CHECK(run_cli(dir.path, "leaderboard --store " + store.string()).exit_code == 3);
}

TEST_CASE("config file drives the store model and mismatches are caught") {
    TempDir dir;
    fs::path config = dir.path / "gridrate.conf";
    fs::path store = dir.path / "players.store";
    {
        std::ofstream out(config);
        out << "beta=0.9\nn=200\nhalf_width=6\nsigma0=0.6\nsigma_kappa=0.02\nengine=fft\n";
    }
    REQUIRE(run_cli(dir.path, "init --config " + config.string() + " --store " + store.string())
                .exit_code == 0);
    std::string text = slurp(store);
    CHECK(text.find("\"beta\": 0.9") != std::string::npos);
    CHECK(text.find("\"n\": 200") != std::string::npos);

    // A different model in the config now conflicts with the store header.
    {
        std::ofstream out(config);
        out << "beta=0.5\nn=200\nhalf_width=6\nsigma0=0.6\nsigma_kappa=0.02\n";
    }
    CHECK(run_cli(dir.path, "leaderboard --config " + config.string() + " --store " +
                                store.string())
              .exit_code == 3);
    // Without the config flag the store header alone decides.
    CHECK(run_cli(dir.path, "leaderboard --store " + store.string()).exit_code == 0);
}
