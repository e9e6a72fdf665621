#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "minsemi/runner.hpp"

using namespace minsemi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("minsemi_runner_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small, fast base configuration for command tests.
RunConfig small_config(const std::string& out_dir) {
    RunConfig cfg;
    cfg.dim = 10;
    cfg.buffer = 2;
    cfg.samples = 8;
    cfg.out_dir = out_dir;
    return cfg;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    REQUIRE(bool(in));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("config text applies all keys and rejects unknown ones") {
    RunConfig cfg;
    apply_config_text(cfg,
                      "# comment\n"
                      "dim = 12\n"
                      "buffer=3\n"
                      "energy = 0.5  # trailing comment\n"
                      "sigma_minus = 2\n"
                      "sigma_plus = 0.5\n"
                      "family = kato_scaling\n"
                      "index = 0, 2, 4\n"
                      "kato_r = 0.75\n"
                      "time_start = 0\n"
                      "time_stop = 2\n"
                      "time_steps = 4\n"
                      "euler_steps = 8,16\n"
                      "samples = 16\n"
                      "seed = 99\n"
                      "out_dir = /tmp/somewhere\n"
                      "strict_iii = true\n"
                      "require_markov = no\n");
    CHECK(cfg.dim == 12);
    CHECK(cfg.buffer == 3);
    CHECK(cfg.energy == doctest::Approx(0.5));
    CHECK(cfg.sigma_minus == doctest::Approx(2.0));
    CHECK(cfg.family == "kato_scaling");
    CHECK(cfg.index == std::vector<double>{0.0, 2.0, 4.0});
    CHECK(cfg.kato_r == doctest::Approx(0.75));
    CHECK(cfg.time_steps == 4);
    CHECK(cfg.euler_steps == std::vector<long>{8, 16});
    CHECK(cfg.samples == 16);
    CHECK(cfg.seed == 99);
    CHECK(cfg.out_dir == "/tmp/somewhere");
    CHECK(cfg.strict_iii);
    CHECK_FALSE(cfg.require_markov);

    try {
        apply_config_text(cfg, "bogus_key = 1\n");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
    CHECK_THROWS_AS(apply_config_text(cfg, "dim 12\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "dim = twelve\n"), ConfigError);
    // Selectors are flag-only, not config-file keys.
    CHECK_THROWS_AS(apply_config_text(cfg, "axis = euler\n"), ConfigError);
    CHECK_NOTHROW(apply_override(cfg, "axis", "euler"));
    CHECK(cfg.axis == "euler");
}

TEST_CASE("read_key round-trips every settable key") {
    RunConfig cfg;
    for (const char* key :
         {"dim", "buffer", "energy", "sigma_minus", "sigma_plus", "family",
          "index", "kato_r", "time_start", "time_stop", "time_steps",
          "euler_steps", "samples", "seed", "out_dir", "strict_iii",
          "require_markov", "axis", "state"}) {
        const std::string echoed = read_key(cfg, key);
        RunConfig other;
        apply_override(other, key, echoed);
        CHECK(read_key(other, key) == echoed);
    }
    CHECK_THROWS_AS((void)read_key(cfg, "nope"), ConfigError);
}

TEST_CASE("validate rejects out-of-range configuration") {
    RunConfig cfg;
    cfg.dim = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.family = "frobnicate";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.axis = "sideways";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.time_steps = 5;
    cfg.time_stop = 0.0;
    CHECK_THROWS_AS((void)cmd_evolve(cfg), ConfigError);
}

TEST_CASE("verify writes reports.json and an accurate manifest") {
    TempDir dir("verify");
    RunConfig cfg = small_config(dir.str());
    CHECK(cmd_verify(cfg) == 0);

    const auto reports =
        nlohmann::json::parse(slurp(dir.file("reports.json")));
    REQUIRE(reports.is_array());
    CHECK(reports.size() >= 10);
    for (const auto& r : reports) {
        CHECK(r.contains("name"));
        CHECK(r.contains("passed"));
        CHECK(r.contains("worst_violation"));
        CHECK(r.contains("tolerance"));
        CHECK(r.contains("verdict"));
        CHECK(r.contains("witness"));
        CHECK(r.contains("seed"));
        CHECK(r.contains("params"));
        CHECK(r.contains("informational"));
        CHECK(r.contains("notes"));
        if (!r["informational"].get<bool>()) CHECK(r["passed"].get<bool>());
    }

    const auto manifest =
        nlohmann::json::parse(slurp(dir.file("manifest.json")));
    CHECK(manifest["command"] == "verify");
    CHECK(manifest["config"]["dim"] == 10);
    CHECK(manifest["config"]["seed"] == cfg.seed);
    CHECK(manifest["config"].size() == 17);
    CHECK(manifest.contains("versions"));
    CHECK(manifest.contains("wall_time_s"));
    CHECK(manifest["results"]["exit_code"] == 0);
}

TEST_CASE("verify run twice produces byte-identical reports") {
    TempDir a("verify_a"), b("verify_b");
    RunConfig cfg = small_config(a.str());
    CHECK(cmd_verify(cfg) == 0);
    cfg.out_dir = b.str();
    CHECK(cmd_verify(cfg) == 0);
    CHECK(slurp(a.file("reports.json")) == slurp(b.file("reports.json")));
}

TEST_CASE("verify exit codes: strict findings and required markov") {
    TempDir dir("verify_exit");
    RunConfig cfg = small_config(dir.str());
    cfg.sigma_plus = 0.0;  // deterministic projector-family violation
    cfg.strict_iii = true;  // ...which strict mode promotes to a failure
    CHECK(cmd_verify(cfg) == 1);

    cfg = small_config(dir.str());
    cfg.sigma_minus = 0.25;
    cfg.sigma_plus = 1.0;  // trace-preservation check skips
    cfg.require_markov = true;
    CHECK(cmd_verify(cfg) == 1);
    const auto manifest =
        nlohmann::json::parse(slurp(dir.file("manifest.json")));
    CHECK(manifest["results"]["required_skipped"] ==
          "markov_trace_preservation");
}

TEST_CASE("evolve reproduces the closed-form no-jump decay") {
    TempDir dir("evolve_decay");
    RunConfig cfg = small_config(dir.str());
    cfg.family = "h";
    cfg.state = "basis:1";
    cfg.time_stop = 2.0;
    cfg.time_steps = 10;
    CHECK(cmd_evolve(cfg) == 0);

    const auto rows = read_csv(dir.file("trajectory.csv"));
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == std::vector<std::string>{"t", "trace", "trace_norm",
                                              "min_eig", "purity",
                                              "mean_occupation"});
    const double rate = cfg.sigma_minus + 2.0 * cfg.sigma_plus;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double t = std::stod(rows[i][0]);
        const double trace = std::stod(rows[i][1]);
        CHECK(trace ==
              doctest::Approx(std::exp(-rate * t)).epsilon(1e-9));
    }
}

TEST_CASE("evolve keeps the trace flat under the full generator") {
    TempDir dir("evolve_markov");
    RunConfig cfg = small_config(dir.str());
    cfg.state = "seeded";
    cfg.time_steps = 5;
    CHECK(cmd_evolve(cfg) == 0);
    const auto rows = read_csv(dir.file("trajectory.csv"));
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::abs(std::stod(rows[i][1]) - 1.0) < 1e-6);
}

TEST_CASE("evolve with a single grid point echoes the initial state") {
    TempDir dir("evolve_single");
    RunConfig cfg = small_config(dir.str());
    cfg.state = "basis:3";
    cfg.time_steps = 0;
    cfg.time_start = 0.0;
    CHECK(cmd_evolve(cfg) == 0);
    const auto rows = read_csv(dir.file("trajectory.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][0]) == 0.0);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0));
    CHECK(std::stod(rows[1][5]) == doctest::Approx(3.0));
}

TEST_CASE("evolve accepts state files and rejects bad specifications") {
    TempDir dir("evolve_state");
    RunConfig cfg = small_config(dir.str());

    {
        std::ofstream out(dir.file("diag.json"));
        out << R"({"diag": [0.5, 0.5, 0, 0, 0, 0, 0, 0, 0, 0]})";
    }
    cfg.state = "file:" + dir.file("diag.json");
    cfg.time_steps = 2;
    CHECK(cmd_evolve(cfg) == 0);

    cfg.state = "basis:10";  // outside {0..9}
    CHECK_THROWS_AS((void)cmd_evolve(cfg), ConfigError);
    cfg.state = "hovercraft";
    CHECK_THROWS_AS((void)cmd_evolve(cfg), ConfigError);
    cfg.state = "file:" + dir.file("missing.json");
    CHECK_THROWS_AS((void)cmd_evolve(cfg), ConfigError);

    {
        std::ofstream out(dir.file("skew.json"));
        out << R"({"re": [[0,1],[0,0]]})";
    }
    cfg.dim = 2;
    cfg.buffer = 0;
    cfg.state = "file:" + dir.file("skew.json");
    CHECK_THROWS_AS((void)cmd_evolve(cfg), ConfigError);
}

TEST_CASE("study sweeps cutoff and kato axes through the sweep table") {
    TempDir dir("study_axes");
    RunConfig cfg = small_config(dir.str());
    cfg.axis = "cutoff";
    CHECK(cmd_study(cfg) == 0);
    auto rows = read_csv(dir.file("study.csv"));
    CHECK(rows[0] ==
          std::vector<std::string>{"axis", "value", "evolve_error",
                                   "evolve_min_eig", "resolvent_error",
                                   "resolvent_min_eig"});
    REQUIRE(rows.size() > 2);
    CHECK(rows[1][0] == "cutoff");
    // Errors shrink from the first to the maximal cutoff.
    CHECK(std::stod(rows.back()[2]) < std::stod(rows[1][2]));

    auto manifest = nlohmann::json::parse(slurp(dir.file("manifest.json")));
    CHECK(manifest["config"]["index"].size() == rows.size() - 1);

    cfg.axis = "kato";
    cfg.index = {0.0, 0.5, 0.9};
    CHECK(cmd_study(cfg) == 0);
    rows = read_csv(dir.file("study.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[3][2]) < std::stod(rows[1][2]));
}

TEST_CASE("study euler axis records the fitted slope") {
    TempDir dir("study_euler");
    RunConfig cfg = small_config(dir.str());
    cfg.axis = "euler";
    cfg.euler_steps = {64, 128, 256, 512, 1024};
    CHECK(cmd_study(cfg) == 0);
    const auto rows = read_csv(dir.file("study.csv"));
    CHECK(rows[0] == std::vector<std::string>{"axis", "value", "error"});
    REQUIRE(rows.size() == 6);
    const auto manifest =
        nlohmann::json::parse(slurp(dir.file("manifest.json")));
    const double slope = manifest["results"]["euler_slope"].get<double>();
    CHECK(std::abs(slope + 1.0) < 0.2);
}

TEST_CASE("study truncation axis reports trace drift per dimension") {
    TempDir dir("study_trunc");
    RunConfig cfg = small_config(dir.str());
    cfg.axis = "truncation";
    cfg.index = {8, 12, 16};
    cfg.time_steps = 4;
    CHECK(cmd_study(cfg) == 0);
    const auto rows = read_csv(dir.file("study.csv"));
    CHECK(rows[0] ==
          std::vector<std::string>{"axis", "value", "trace_drift"});
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][2]) < 1e-6);

    cfg.index = {100};
    CHECK_THROWS_AS((void)cmd_study(cfg), ConfigError);
    cfg.index = {8.5};
    CHECK_THROWS_AS((void)cmd_study(cfg), ConfigError);
}

TEST_CASE("counterexample scan: agreement, pinned value, exit codes") {
    TempDir dir("ce");
    RunConfig cfg = small_config(dir.str());
    cfg.dim = 16;
    cfg.sigma_minus = 1.0;
    cfg.sigma_plus = 1.0;
    CHECK(cmd_counterexample(cfg) == 0);

    const auto rows = read_csv(dir.file("counterexample.csv"));
    CHECK(rows[0] ==
          std::vector<std::string>{"k", "lambda", "closed_form_value",
                                   "matrix_value", "negative"});
    bool found_pinned = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double closed = std::stod(rows[i][2]);
        const double direct = std::stod(rows[i][3]);
        CHECK(std::abs(closed - direct) <= 1e-9);
        CHECK(rows[i][4] == (direct < 0.0 ? "1" : "0"));
        if (rows[i][0] == "10" && std::stod(rows[i][1]) == 0.4) {
            found_pinned = true;
            CHECK(closed == doctest::Approx(-0.84).epsilon(1e-9));
            CHECK(rows[i][4] == "1");
        }
        if (std::stod(rows[i][1]) == 0.0) CHECK(rows[i][4] == "0");
    }
    CHECK(found_pinned);

    // Strong damping keeps the scanned window positive -> exit 1.
    cfg.sigma_minus = 20.0;
    cfg.sigma_plus = 0.0;
    CHECK(cmd_counterexample(cfg) == 1);

    cfg = small_config(dir.str());
    cfg.dim = 3;
    cfg.buffer = 0;
    CHECK_THROWS_AS((void)cmd_counterexample(cfg), ConfigError);
}

TEST_CASE("manifest replay reproduces CSV outputs byte for byte") {
    TempDir a("replay_a"), b("replay_b");
    RunConfig cfg = small_config(a.str());
    cfg.state = "seeded";
    cfg.time_steps = 6;
    CHECK(cmd_evolve(cfg) == 0);

    RunConfig replay;
    const std::string command = load_manifest(replay, a.file("manifest.json"));
    CHECK(command == "evolve");
    CHECK(replay.dim == cfg.dim);
    CHECK(replay.state == "seeded");
    replay.out_dir = b.str();
    CHECK(run_command(command, replay) == 0);
    CHECK(slurp(a.file("trajectory.csv")) == slurp(b.file("trajectory.csv")));

    CHECK_THROWS_AS((void)load_manifest(replay, a.file("absent.json")),
                    ConfigError);
    CHECK_THROWS_AS((void)run_command("launch", replay), ConfigError);
}
