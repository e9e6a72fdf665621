#include "minsemi/runner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <climits>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <utility>

#include "json.hpp"
#include "minsemi/checks.hpp"
#include "minsemi/rng.hpp"

namespace minsemi {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---- string / number plumbing ------------------------------------------

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Locale-independent, whole-token numeric parsing.
double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': cannot parse '" + value +
                          "' as a number");
    return out;
}

long parse_long(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': cannot parse '" + value +
                          "' as an integer");
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    const long out = parse_long(key, value);
    if (out < INT_MIN || out > INT_MAX)
        throw ConfigError("key '" + key + "': value out of range");
    return static_cast<int>(out);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': cannot parse '" + value +
                          "' as an unsigned integer");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': cannot parse '" + value +
                      "' as a boolean");
}

std::vector<std::string> split_commas(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
    std::vector<double> out;
    for (const auto& tok : split_commas(value))
        out.push_back(parse_double(key, tok));
    return out;
}

std::vector<long> parse_long_list(const std::string& key,
                                  const std::string& value) {
    std::vector<long> out;
    for (const auto& tok : split_commas(value))
        out.push_back(parse_long(key, tok));
    return out;
}

// Fixed-precision decimal with 12 significant digits, locale independent.
std::string fmt12(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x,
                                         std::chars_format::general, 12);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

// Shortest exact decimal (round-trips), for echoing configuration values.
std::string fmt_exact(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

template <class T>
std::string join_list(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ",";
        if constexpr (std::is_same_v<T, double>)
            out += fmt_exact(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

// ---- key dispatch --------------------------------------------------------

void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value, bool allow_selectors) {
    if (key == "dim")
        cfg.dim = parse_int(key, value);
    else if (key == "buffer")
        cfg.buffer = parse_int(key, value);
    else if (key == "energy")
        cfg.energy = parse_double(key, value);
    else if (key == "sigma_minus")
        cfg.sigma_minus = parse_double(key, value);
    else if (key == "sigma_plus")
        cfg.sigma_plus = parse_double(key, value);
    else if (key == "family")
        cfg.family = trim(value);
    else if (key == "index")
        cfg.index = parse_double_list(key, value);
    else if (key == "kato_r")
        cfg.kato_r = parse_double(key, value);
    else if (key == "time_start")
        cfg.time_start = parse_double(key, value);
    else if (key == "time_stop")
        cfg.time_stop = parse_double(key, value);
    else if (key == "time_steps")
        cfg.time_steps = parse_int(key, value);
    else if (key == "euler_steps")
        cfg.euler_steps = parse_long_list(key, value);
    else if (key == "samples")
        cfg.samples = parse_int(key, value);
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "out_dir")
        cfg.out_dir = trim(value);
    else if (key == "strict_iii")
        cfg.strict_iii = parse_bool(key, value);
    else if (key == "require_markov")
        cfg.require_markov = parse_bool(key, value);
    else if (allow_selectors && key == "axis")
        cfg.axis = trim(value);
    else if (allow_selectors && key == "state")
        cfg.state = trim(value);
    else
        throw ConfigError("unknown configuration key: '" + key + "'");
}

// ---- output plumbing -----------------------------------------------------

void atomic_write(const std::string& dir, const std::string& filename,
                  const std::string& content) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + dir +
                          "': " + ec.message());
    const fs::path final_path = fs::path(dir) / filename;
    const fs::path tmp_path = fs::path(dir) / (filename + ".tmp");
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot open '" + tmp_path.string() +
                              "' for writing");
        out << content;
        if (!out)
            throw ConfigError("write failed for '" + tmp_path.string() + "'");
    }
    fs::rename(tmp_path, final_path, ec);
    if (ec)
        throw ConfigError("cannot move '" + tmp_path.string() + "' into "
                          "place: " + ec.message());
}

ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json c;
    c["dim"] = cfg.dim;
    c["buffer"] = cfg.buffer;
    c["energy"] = cfg.energy;
    c["sigma_minus"] = cfg.sigma_minus;
    c["sigma_plus"] = cfg.sigma_plus;
    c["family"] = cfg.family;
    c["index"] = cfg.index;
    c["kato_r"] = cfg.kato_r;
    c["time_start"] = cfg.time_start;
    c["time_stop"] = cfg.time_stop;
    c["time_steps"] = cfg.time_steps;
    c["euler_steps"] = cfg.euler_steps;
    c["samples"] = cfg.samples;
    c["seed"] = cfg.seed;
    c["out_dir"] = cfg.out_dir;
    c["strict_iii"] = cfg.strict_iii;
    c["require_markov"] = cfg.require_markov;
    return c;
}

void write_manifest(const std::string& command, const RunConfig& resolved,
                    const ordered_json& results, double wall_seconds) {
    ordered_json m;
    m["command"] = command;
    m["config"] = config_to_json(resolved);
    m["selectors"] = {{"axis", resolved.axis}, {"state", resolved.state}};
    m["versions"] = {{"artifact", MINSEMI_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}};
    m["seed"] = resolved.seed;
    m["wall_time_s"] = wall_seconds;
    if (!results.empty()) m["results"] = results;
    atomic_write(resolved.out_dir, "manifest.json", m.dump(2) + "\n");
}

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// ---- shared command helpers ----------------------------------------------

std::vector<double> time_grid(const RunConfig& cfg) {
    if (cfg.time_start < 0.0)
        throw ConfigError("key 'time_start': must be >= 0");
    if (cfg.time_steps < 0)
        throw ConfigError("key 'time_steps': must be >= 0");
    if (cfg.time_steps == 0) return {cfg.time_start};
    if (!(cfg.time_stop > cfg.time_start))
        throw ConfigError(
            "key 'time_stop': must exceed time_start when time_steps > 0");
    std::vector<double> grid(static_cast<std::size_t>(cfg.time_steps) + 1);
    for (int i = 0; i <= cfg.time_steps; ++i)
        grid[static_cast<std::size_t>(i)] =
            cfg.time_start +
            (cfg.time_stop - cfg.time_start) * i / cfg.time_steps;
    return grid;
}

int resolve_cutoff(const RunConfig& cfg) {
    if (cfg.index.empty()) return cfg.dim - 2;
    const double raw = cfg.index.front();
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-9)
        throw ConfigError("key 'index': projector cutoff " + fmt_exact(raw) +
                          " is not an integer");
    if (rounded < 0 || rounded > cfg.dim - 2)
        throw ConfigError("key 'index': projector cutoff " + fmt_exact(raw) +
                          " outside {0.." + std::to_string(cfg.dim - 2) + "}");
    return static_cast<int>(rounded);
}

SuperOperator generator_for(const RunConfig& cfg, const ModelParams& p,
                            int cutoff) {
    if (cfg.family == "full") return build_generator(p);
    if (cfg.family == "h") return build_H(p);
    if (cfg.family == "number_cutoff")
        return build_generator(p, RegularizationFamily::number_cutoff(cutoff));
    if (cfg.family == "compress_first")
        return build_generator(p,
                               RegularizationFamily::compress_first(cutoff));
    if (cfg.family == "kato_scaling") {
        if (!(cfg.kato_r >= 0.0) || !(cfg.kato_r < 1.0))
            throw ConfigError("key 'kato_r': must lie in [0, 1)");
        return build_generator(p,
                               RegularizationFamily::kato_scaling(cfg.kato_r));
    }
    throw ConfigError("key 'family': unknown generator family '" +
                      cfg.family + "'");
}

int default_interior_support(const ModelParams& p) {
    return std::min(11, p.trunc.interior_top() + 1);
}

HermitianMatrix initial_state(const RunConfig& cfg, const ModelParams& p) {
    const std::string& spec = cfg.state;
    if (spec.rfind("basis:", 0) == 0) {
        const int n = parse_int("state", spec.substr(6));
        if (n < 0 || n >= cfg.dim)
            throw ConfigError("state 'basis:" + std::to_string(n) +
                              "': level outside {0.." +
                              std::to_string(cfg.dim - 1) + "}");
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(cfg.dim);
        e(n) = 1.0;
        return HermitianMatrix::outer(e);
    }
    if (spec == "seeded") {
        Rng rng(cfg.seed);
        return rng.psd_state(cfg.dim, default_interior_support(p), 2);
    }
    if (spec.rfind("file:", 0) == 0) {
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in)
            throw ConfigError("state file '" + path + "': cannot open");
        ordered_json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw ConfigError("state file '" + path + "': " + e.what());
        }
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.dim, cfg.dim);
        try {
            if (j.contains("diag")) {
                const auto diag = j.at("diag").get<std::vector<double>>();
                if (static_cast<int>(diag.size()) != cfg.dim)
                    throw ConfigError("state file '" + path + "': diag has " +
                                      std::to_string(diag.size()) +
                                      " entries, expected " +
                                      std::to_string(cfg.dim));
                for (int i = 0; i < cfg.dim; ++i)
                    m(i, i) = diag[static_cast<std::size_t>(i)];
            } else {
                const auto re =
                    j.at("re").get<std::vector<std::vector<double>>>();
                std::vector<std::vector<double>> im;
                if (j.contains("im"))
                    im = j.at("im").get<std::vector<std::vector<double>>>();
                if (static_cast<int>(re.size()) != cfg.dim)
                    throw ConfigError("state file '" + path +
                                      "': matrix is not " +
                                      std::to_string(cfg.dim) + "x" +
                                      std::to_string(cfg.dim));
                for (int r = 0; r < cfg.dim; ++r) {
                    if (static_cast<int>(re[static_cast<std::size_t>(r)]
                                             .size()) != cfg.dim)
                        throw ConfigError("state file '" + path +
                                          "': ragged matrix row " +
                                          std::to_string(r));
                    for (int c = 0; c < cfg.dim; ++c) {
                        const double a =
                            re[static_cast<std::size_t>(r)]
                              [static_cast<std::size_t>(c)];
                        const double b =
                            im.empty() ? 0.0
                                       : im.at(static_cast<std::size_t>(r))
                                             .at(static_cast<std::size_t>(c));
                        m(r, c) = std::complex<double>(a, b);
                    }
                }
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("state file '" + path + "': " + e.what());
        }
        try {
            return HermitianMatrix(m, p.trunc.eq_tol);
        } catch (const std::exception& e) {
            throw ConfigError("state file '" + path + "': " + e.what());
        }
    }
    throw ConfigError("unknown state specification '" + spec +
                      "' (expected basis:N, seeded, or file:PATH)");
}

}  // namespace

// ---- RunConfig -------------------------------------------------------------

ModelParams RunConfig::model_params() const {
    ModelParams p;
    p.energy = energy;
    p.sigma_minus = sigma_minus;
    p.sigma_plus = sigma_plus;
    p.trunc.dim = dim;
    p.trunc.buffer = buffer;
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return p;
}

void RunConfig::validate() const {
    (void)model_params();
    if (samples < 1) throw ConfigError("key 'samples': must be >= 1");
    if (out_dir.empty()) throw ConfigError("key 'out_dir': must be nonempty");
    static const std::vector<std::string> families{
        "full", "h", "number_cutoff", "compress_first", "kato_scaling"};
    if (std::find(families.begin(), families.end(), family) ==
        families.end())
        throw ConfigError("key 'family': unknown generator family '" +
                          family + "'");
    static const std::vector<std::string> axes{"cutoff", "kato", "euler",
                                               "truncation"};
    if (std::find(axes.begin(), axes.end(), axis) == axes.end())
        throw ConfigError("axis '" + axis +
                          "': expected cutoff, kato, euler, or truncation");
    for (long n : euler_steps)
        if (n < 1)
            throw ConfigError("key 'euler_steps': entries must be >= 1");
    if (time_start < 0.0)
        throw ConfigError("key 'time_start': must be >= 0");
    if (time_steps < 0)
        throw ConfigError("key 'time_steps': must be >= 0");
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
    apply_key(cfg, trim(key), value, /*allow_selectors=*/true);
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                  /*allow_selectors=*/false);
    }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str());
}

std::string read_key(const RunConfig& cfg, const std::string& key) {
    if (key == "dim") return std::to_string(cfg.dim);
    if (key == "buffer") return std::to_string(cfg.buffer);
    if (key == "energy") return fmt_exact(cfg.energy);
    if (key == "sigma_minus") return fmt_exact(cfg.sigma_minus);
    if (key == "sigma_plus") return fmt_exact(cfg.sigma_plus);
    if (key == "family") return cfg.family;
    if (key == "index") return join_list(cfg.index);
    if (key == "kato_r") return fmt_exact(cfg.kato_r);
    if (key == "time_start") return fmt_exact(cfg.time_start);
    if (key == "time_stop") return fmt_exact(cfg.time_stop);
    if (key == "time_steps") return std::to_string(cfg.time_steps);
    if (key == "euler_steps") return join_list(cfg.euler_steps);
    if (key == "samples") return std::to_string(cfg.samples);
    if (key == "seed") return std::to_string(cfg.seed);
    if (key == "out_dir") return cfg.out_dir;
    if (key == "strict_iii") return cfg.strict_iii ? "true" : "false";
    if (key == "require_markov") return cfg.require_markov ? "true" : "false";
    if (key == "axis") return cfg.axis;
    if (key == "state") return cfg.state;
    throw ConfigError("unknown configuration key: '" + key + "'");
}

std::string load_manifest(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest '" + path + "'");
    ordered_json m;
    try {
        in >> m;
        const auto& c = m.at("config");
        cfg.dim = c.at("dim").get<int>();
        cfg.buffer = c.at("buffer").get<int>();
        cfg.energy = c.at("energy").get<double>();
        cfg.sigma_minus = c.at("sigma_minus").get<double>();
        cfg.sigma_plus = c.at("sigma_plus").get<double>();
        cfg.family = c.at("family").get<std::string>();
        cfg.index = c.at("index").get<std::vector<double>>();
        cfg.kato_r = c.at("kato_r").get<double>();
        cfg.time_start = c.at("time_start").get<double>();
        cfg.time_stop = c.at("time_stop").get<double>();
        cfg.time_steps = c.at("time_steps").get<int>();
        cfg.euler_steps = c.at("euler_steps").get<std::vector<long>>();
        cfg.samples = c.at("samples").get<int>();
        cfg.seed = c.at("seed").get<std::uint64_t>();
        cfg.out_dir = c.at("out_dir").get<std::string>();
        cfg.strict_iii = c.at("strict_iii").get<bool>();
        cfg.require_markov = c.at("require_markov").get<bool>();
        if (m.contains("selectors")) {
            cfg.axis = m.at("selectors").at("axis").get<std::string>();
            cfg.state = m.at("selectors").at("state").get<std::string>();
        }
        return m.at("command").get<std::string>();
    } catch (const std::exception& e) {
        throw ConfigError("manifest '" + path + "': " + e.what());
    }
}

// ---- commands ---------------------------------------------------------------

int cmd_verify(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = clock_type::now();
    const ModelParams p = cfg.model_params();
    const std::vector<CheckReport> reports =
        run_suite(p, cfg.seed, cfg.samples);

    ordered_json arr = ordered_json::array();
    int exit_code = 0;
    std::vector<std::string> failed;
    for (const auto& r : reports) {
        ordered_json o;
        o["name"] = r.name;
        o["passed"] = r.passed;
        o["worst_violation"] = r.worst_violation;
        o["tolerance"] = r.tolerance;
        o["verdict"] = r.verdict;
        o["witness"] = r.witness;
        o["seed"] = r.seed;
        o["params"] = r.params;
        o["informational"] = r.informational;
        o["notes"] = r.notes;
        arr.push_back(std::move(o));

        const bool counts = !r.passed && (!r.informational || cfg.strict_iii);
        const char* status = r.verdict == kVerdictSkipped ? "SKIP"
                             : r.passed                   ? "PASS"
                             : counts                     ? "FAIL"
                                                          : "INFO";
        std::printf("[%s] %-38s worst=%s tol=%s\n", status, r.name.c_str(),
                    fmt12(r.worst_violation).c_str(),
                    fmt12(r.tolerance).c_str());
        if (counts) {
            exit_code = 1;
            failed.push_back(r.name);
        }
    }

    ordered_json results;
    if (cfg.require_markov) {
        const auto it = std::find_if(
            reports.begin(), reports.end(), [](const CheckReport& r) {
                return r.name == "markov_trace_preservation";
            });
        if (it != reports.end() && it->verdict == kVerdictSkipped) {
            exit_code = 1;
            results["required_skipped"] = it->name;
            std::printf("verify: required check %s was skipped (%s)\n",
                        it->name.c_str(), it->notes.c_str());
        }
    }
    results["exit_code"] = exit_code;
    results["checks"] = reports.size();
    results["failed"] = failed;

    atomic_write(cfg.out_dir, "reports.json", arr.dump(2) + "\n");
    write_manifest("verify", cfg, results, seconds_since(t0));
    std::printf("verify: %zu checks, %zu failing -> exit %d\n",
                reports.size(), failed.size(), exit_code);
    return exit_code;
}

int cmd_evolve(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = clock_type::now();
    const ModelParams p = cfg.model_params();

    RunConfig resolved = cfg;
    int cutoff = 0;
    if (cfg.family == "number_cutoff" || cfg.family == "compress_first") {
        cutoff = resolve_cutoff(cfg);
        resolved.index = {static_cast<double>(cutoff)};
    }
    const SuperOperator gen = generator_for(cfg, p, cutoff);
    const HermitianMatrix rho0 = initial_state(cfg, p);
    const std::vector<double> grid = time_grid(cfg);

    EvolutionRecord rec;
    try {
        rec = evolve(gen, rho0, grid);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("evolution failed: ") + e.what());
    }

    std::string csv = "t,trace,trace_norm,min_eig,purity,mean_occupation\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const StateDiagnostics& d = rec.diagnostics[i];
        csv += fmt12(rec.times[i]) + "," + fmt12(d.trace) + "," +
               fmt12(d.trace_norm) + "," + fmt12(d.min_eigenvalue) + "," +
               fmt12(d.purity) + "," + fmt12(d.mean_occupation) + "\n";
    }

    ordered_json results;
    results["rows"] = rec.times.size();
    results["final_trace"] = rec.diagnostics.back().trace;

    atomic_write(cfg.out_dir, "trajectory.csv", csv);
    write_manifest("evolve", resolved, results, seconds_since(t0));
    std::printf("evolve: %zu rows -> trajectory.csv\n", rec.times.size());
    return 0;
}

int cmd_study(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = clock_type::now();
    const ModelParams p = cfg.model_params();
    RunConfig resolved = cfg;
    ordered_json results;
    std::string csv;

    if (cfg.axis == "cutoff" || cfg.axis == "kato") {
        if (!(cfg.time_stop > 0.0))
            throw ConfigError("key 'time_stop': sweep time must be > 0");
        FamilyKind kind = FamilyKind::KatoScaling;
        if (cfg.axis == "cutoff") {
            kind = cfg.family == "compress_first" ? FamilyKind::CompressFirst
                                                  : FamilyKind::NumberCutoff;
            resolved.family = kind == FamilyKind::CompressFirst
                                  ? "compress_first"
                                  : "number_cutoff";
        } else {
            resolved.family = "kato_scaling";
        }

        std::vector<double> values = cfg.index;
        if (values.empty()) {
            if (cfg.axis == "cutoff") {
                values = {0.0, 1.0};
                for (int n = 2; n < cfg.dim - 2; n *= 2)
                    values.push_back(n);
                values.push_back(cfg.dim - 2);
            } else {
                values = {0.0, 0.25, 0.5, 0.75, 0.9, 0.99};
            }
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()),
                     values.end());
        resolved.index = values;

        Rng rng(cfg.seed);
        const HermitianMatrix rho0 =
            rng.psd_state(cfg.dim, default_interior_support(p), 2);
        std::vector<SweepRow> rows;
        try {
            rows = regularization_sweep(p, kind, values, cfg.time_stop, rho0);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("key 'index': ") + e.what());
        }

        csv = "axis,value,evolve_error,evolve_min_eig,resolvent_error,"
              "resolvent_min_eig\n";
        for (const auto& row : rows)
            csv += cfg.axis + "," + fmt12(row.index) + "," +
                   fmt12(row.evolve_error) + "," + fmt12(row.evolve_min_eig) +
                   "," + fmt12(row.resolvent_error) + "," +
                   fmt12(row.resolvent_min_eig) + "\n";
        results["rows"] = rows.size();
        results["final_evolve_error"] = rows.back().evolve_error;
    } else if (cfg.axis == "euler") {
        if (!(cfg.time_stop > 0.0))
            throw ConfigError("key 'time_stop': sweep time must be > 0");
        std::vector<long> steps = cfg.euler_steps;
        std::sort(steps.begin(), steps.end());
        steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
        if (steps.empty())
            throw ConfigError("key 'euler_steps': list is empty");
        resolved.euler_steps = steps;

        const SuperOperator gen = build_generator(p);
        Rng rng(cfg.seed);
        const HermitianMatrix u = rng.psd_state(cfg.dim, cfg.dim, 2);
        const HermitianMatrix ref = exp_apply(gen, -cfg.time_stop, u);

        csv = "axis,value,error\n";
        std::vector<double> ln_n, ln_e;
        for (long n : steps) {
            const double err =
                trace_norm(euler_power(gen, cfg.time_stop, n, u) - ref);
            csv += "euler," + std::to_string(n) + "," + fmt12(err) + "\n";
            if (err > 1e-300) {
                ln_n.push_back(std::log(static_cast<double>(n)));
                ln_e.push_back(std::log(err));
            }
        }
        results["rows"] = steps.size();
        if (ln_n.size() >= 2) {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < ln_n.size(); ++i) {
                mx += ln_n[i];
                my += ln_e[i];
            }
            mx /= static_cast<double>(ln_n.size());
            my /= static_cast<double>(ln_n.size());
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t i = 0; i < ln_n.size(); ++i) {
                sxy += (ln_n[i] - mx) * (ln_e[i] - my);
                sxx += (ln_n[i] - mx) * (ln_n[i] - mx);
            }
            results["euler_slope"] = sxy / sxx;
        }
    } else if (cfg.axis == "truncation") {
        std::vector<double> values =
            cfg.index.empty() ? std::vector<double>{20.0, 40.0, 80.0}
                              : cfg.index;
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()),
                     values.end());
        resolved.index = values;
        int min_dim = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double raw = values[i];
            if (std::abs(raw - std::round(raw)) > 1e-9)
                throw ConfigError("key 'index': truncation dimension " +
                                  fmt_exact(raw) + " is not an integer");
            const int d = static_cast<int>(std::round(raw));
            if (d > 96)
                throw ConfigError(
                    "key 'index': truncation dimensions above 96 exceed the "
                    "dense superoperator memory budget");
            ModelParams pd = p;
            pd.trunc.dim = d;
            try {
                pd.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("key 'index': ") + e.what());
            }
            if (i == 0) min_dim = d;
        }
        const int support =
            std::min(11, min_dim - cfg.buffer);
        const std::vector<double> grid = time_grid(cfg);

        csv = "axis,value,trace_drift\n";
        double last_drift = 0.0;
        for (double raw : values) {
            const int d = static_cast<int>(std::round(raw));
            ModelParams pd = p;
            pd.trunc.dim = d;
            Rng rng(cfg.seed);
            const HermitianMatrix rho0 = rng.psd_state(d, support, 2);
            const EvolutionRecord rec =
                evolve(build_generator(pd), rho0, grid);
            double drift = 0.0;
            for (const auto& diag : rec.diagnostics)
                drift = std::max(drift, std::abs(diag.trace - 1.0));
            csv += "truncation," + std::to_string(d) + "," + fmt12(drift) +
                   "\n";
            last_drift = drift;
        }
        results["rows"] = values.size();
        results["final_trace_drift"] = last_drift;
    } else {
        throw ConfigError("axis '" + cfg.axis +
                          "': expected cutoff, kato, euler, or truncation");
    }

    atomic_write(cfg.out_dir, "study.csv", csv);
    write_manifest("study", resolved, results, seconds_since(t0));
    std::printf("study: axis %s -> study.csv\n", cfg.axis.c_str());
    return 0;
}

int cmd_counterexample(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = clock_type::now();
    const ModelParams p = cfg.model_params();
    const int kmax = std::min(20, cfg.dim - 2);
    if (kmax < 2)
        throw ConfigError(
            "key 'dim': the counterexample scan needs dim >= 4");

    const SuperOperator h = build_H(p);
    const double sm = cfg.sigma_minus, sp = cfg.sigma_plus, en = cfg.energy;

    std::string csv = "k,lambda,closed_form_value,matrix_value,negative\n";
    bool agree = true;
    bool negative_found = false;
    double worst_gap = 0.0;
    double most_negative = 0.0;
    for (int k = 2; k <= kmax; ++k) {
        for (int li = 0; li <= 9; ++li) {
            const double lam = 0.1 * li;
            const double closed = -2.0 * (k - 1) * lam * en +
                                  (sm + sp) * (1.0 + k * lam * lam) +
                                  sp * (1.0 + lam * lam);
            Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(cfg.dim);
            psi(1) = 1.0;
            psi(k) = std::complex<double>(0.0, lam);
            Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(cfg.dim);
            phi(1) = 1.0;
            phi(k) = 1.0;
            const HermitianMatrix hrho =
                apply(h, HermitianMatrix::outer(psi));
            const std::complex<double> form = phi.dot(hrho.entries() * phi);
            const double gap = std::max(std::abs(form.real() - closed),
                                        std::abs(form.imag()));
            worst_gap = std::max(worst_gap, gap);
            if (gap > 1e-9) agree = false;
            const bool negative = form.real() < 0.0;
            if (negative) {
                negative_found = true;
                most_negative = std::min(most_negative, form.real());
            }
            csv += std::to_string(k) + "," + fmt12(lam) + "," +
                   fmt12(closed) + "," + fmt12(form.real()) + "," +
                   (negative ? "1" : "0") + "\n";
        }
    }

    const int exit_code = (agree && negative_found) ? 0 : 1;
    ordered_json results;
    results["exit_code"] = exit_code;
    results["worst_agreement_gap"] = worst_gap;
    results["negative_found"] = negative_found;
    if (negative_found) results["most_negative"] = most_negative;

    atomic_write(cfg.out_dir, "counterexample.csv", csv);
    write_manifest("counterexample", cfg, results, seconds_since(t0));
    std::printf("counterexample: agreement gap %s, negative %s -> exit %d\n",
                fmt12(worst_gap).c_str(), negative_found ? "found" : "absent",
                exit_code);
    return exit_code;
}

int run_command(const std::string& command, const RunConfig& cfg) {
    if (command == "verify") return cmd_verify(cfg);
    if (command == "evolve") return cmd_evolve(cfg);
    if (command == "study") return cmd_study(cfg);
    if (command == "counterexample") return cmd_counterexample(cfg);
    throw ConfigError("unknown command '" + command +
                      "' (expected verify, evolve, study, or "
                      "counterexample)");
}

}  // namespace minsemi
