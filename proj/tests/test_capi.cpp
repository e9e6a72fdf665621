#include "doctest.h"

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "minsemi.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("minsemi_capi_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

struct Handle {
    ms_run* run = ms_run_create();
    ~Handle() { ms_run_destroy(run); }
};

std::string get(const ms_run* run, const char* key) {
    char buf[256];
    REQUIRE(ms_run_get(run, key, buf, sizeof(buf)) == MS_OK);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("version and error state are well defined at rest") {
    CHECK(std::strcmp(ms_version(), "1.0.0") == 0);
    Handle h;
    REQUIRE(h.run != nullptr);
    CHECK(std::strcmp(ms_last_error(), "") == 0);
    ms_run_destroy(nullptr);  // must be a no-op
}

TEST_CASE("set/get round-trips keys and reports unknown ones") {
    Handle h;
    CHECK(get(h.run, "dim") == "40");
    CHECK(get(h.run, "family") == "full");
    CHECK(get(h.run, "strict_iii") == "false");

    CHECK(ms_run_set(h.run, "dim", "12") == MS_OK);
    CHECK(ms_run_set(h.run, "index", "1, 3") == MS_OK);
    CHECK(ms_run_set(h.run, "axis", "euler") == MS_OK);
    CHECK(ms_run_set(h.run, "state", "basis:2") == MS_OK);
    CHECK(get(h.run, "dim") == "12");
    CHECK(get(h.run, "index") == "1,3");
    CHECK(get(h.run, "axis") == "euler");
    CHECK(get(h.run, "state") == "basis:2");

    CHECK(ms_run_set(h.run, "gravity", "9.81") == MS_ERROR);
    CHECK(std::string(ms_last_error()).find("gravity") != std::string::npos);
    CHECK(ms_run_set(h.run, "dim", "a lot") == MS_ERROR);
    CHECK(std::string(ms_last_error()).find("dim") != std::string::npos);
    // A successful call clears the sticky message.
    CHECK(ms_run_set(h.run, "dim", "10") == MS_OK);
    CHECK(std::strcmp(ms_last_error(), "") == 0);
}

TEST_CASE("get fails cleanly on small buffers and bad arguments") {
    Handle h;
    char tiny[3];
    CHECK(ms_run_get(h.run, "euler_steps", tiny, sizeof(tiny)) == MS_ERROR);
    CHECK(std::string(ms_last_error()).find("euler_steps") !=
          std::string::npos);
    char buf[64];
    CHECK(ms_run_get(h.run, "nope", buf, sizeof(buf)) == MS_ERROR);
    CHECK(ms_run_get(nullptr, "dim", buf, sizeof(buf)) == MS_ERROR);
    CHECK(ms_run_get(h.run, nullptr, buf, sizeof(buf)) == MS_ERROR);
    CHECK(ms_run_get(h.run, "dim", nullptr, 0) == MS_ERROR);
    CHECK(ms_run_set(nullptr, "dim", "4") == MS_ERROR);
    CHECK(ms_run_set(h.run, "dim", nullptr) == MS_ERROR);
    CHECK(ms_run_load_file(h.run, nullptr) == MS_ERROR);
    CHECK(ms_run_load_manifest(nullptr, "x") == MS_ERROR);
    CHECK(ms_run_command(nullptr, "verify") == 2);
}

TEST_CASE("load_file applies configuration files and rejects bad ones") {
    TempDir dir("load");
    Handle h;
    {
        std::ofstream out(dir.file("run.cfg"));
        out << "dim = 9\nsigma_plus = 0.5\nseed = 7\n";
    }
    REQUIRE(ms_run_load_file(h.run, dir.file("run.cfg").c_str()) == MS_OK);
    CHECK(get(h.run, "dim") == "9");
    CHECK(get(h.run, "sigma_plus") == "0.5");
    CHECK(get(h.run, "seed") == "7");

    {
        std::ofstream out(dir.file("bad.cfg"));
        out << "axis = euler\n";  // selector keys are not file keys
    }
    CHECK(ms_run_load_file(h.run, dir.file("bad.cfg").c_str()) == MS_ERROR);
    CHECK(ms_run_load_file(h.run, dir.file("absent.cfg").c_str()) ==
          MS_ERROR);
}

TEST_CASE("commands execute and errors surface as exit code 2") {
    TempDir dir("cmd");
    Handle h;
    REQUIRE(ms_run_set(h.run, "dim", "10") == MS_OK);
    REQUIRE(ms_run_set(h.run, "buffer", "2") == MS_OK);
    REQUIRE(ms_run_set(h.run, "samples", "8") == MS_OK);
    REQUIRE(ms_run_set(h.run, "out_dir", dir.file("out").c_str()) == MS_OK);

    CHECK(ms_run_command(h.run, "verify") == 0);
    CHECK(fs::exists(dir.path / "out" / "reports.json"));
    CHECK(fs::exists(dir.path / "out" / "manifest.json"));

    CHECK(ms_run_command(h.run, "teleport") == 2);
    CHECK(std::string(ms_last_error()).find("teleport") !=
          std::string::npos);
    // No manifest loaded, so a replay has nothing to run.
    CHECK(ms_run_command(h.run, nullptr) == 2);

    REQUIRE(ms_run_set(h.run, "family", "warp") == MS_OK);
    CHECK(ms_run_command(h.run, "evolve") == 2);
    CHECK(std::string(ms_last_error()).find("family") != std::string::npos);
}

TEST_CASE("manifest load replays the recorded command byte for byte") {
    TempDir dir("replay");
    Handle h;
    REQUIRE(ms_run_set(h.run, "dim", "10") == MS_OK);
    REQUIRE(ms_run_set(h.run, "buffer", "2") == MS_OK);
    REQUIRE(ms_run_set(h.run, "time_steps", "6") == MS_OK);
    REQUIRE(ms_run_set(h.run, "state", "seeded") == MS_OK);
    REQUIRE(ms_run_set(h.run, "out_dir", dir.file("a").c_str()) == MS_OK);
    REQUIRE(ms_run_command(h.run, "evolve") == 0);

    Handle r;
    REQUIRE(ms_run_load_manifest(
                r.run, (dir.path / "a" / "manifest.json").string().c_str()) ==
            MS_OK);
    CHECK(get(r.run, "dim") == "10");
    CHECK(get(r.run, "state") == "seeded");
    REQUIRE(ms_run_set(r.run, "out_dir", dir.file("b").c_str()) == MS_OK);
    REQUIRE(ms_run_command(r.run, nullptr) == 0);
    CHECK(slurp((dir.path / "a" / "trajectory.csv").string()) ==
          slurp((dir.path / "b" / "trajectory.csv").string()));

    CHECK(ms_run_load_manifest(r.run, dir.file("absent.json").c_str()) ==
          MS_ERROR);
}
