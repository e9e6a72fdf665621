// Command-line front end. All model work happens behind the C API; this
// file only maps flags onto configuration keys and picks the command.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minsemi.h"

namespace {

// File keys plus the flag-only selectors, in documentation order.
const std::vector<std::string> kKeys = {
    "dim",         "buffer",     "energy",       "sigma_minus",
    "sigma_plus",  "family",     "index",        "kato_r",
    "time_start",  "time_stop",  "time_steps",   "euler_steps",
    "samples",     "seed",       "out_dir",      "axis",
    "state",
};

std::string flag_name(const std::string& key) {
    std::string out = "--" + key;
    for (auto& c : out)
        if (c == '_') c = '-';
    return out;
}

struct SubState {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    bool strict_iii = false;
    bool require_markov = false;
    std::string generator;
    std::string config_path;
    std::string manifest_path;
};

void add_common_options(SubState& st) {
    st.app->add_option("--config", st.config_path,
                       "flat key = value configuration file");
    st.app->add_option("--manifest", st.manifest_path,
                       "manifest.json of a previous run (loaded before "
                       "--config and flags)");
    for (const auto& key : kKeys)
        st.app->add_option(flag_name(key), st.values[key],
                           "override configuration key '" + key + "'");
    st.app->add_flag("--strict-iii", st.strict_iii,
                     "treat informational findings as failures");
    st.app->add_flag("--require-markov", st.require_markov,
                     "fail if the trace-preservation check is skipped");
    st.app->add_option("--generator", st.generator,
                       "generator shorthand: H (no-jump part) or full");
}

int fail_usage() {
    std::fprintf(stderr, "error: %s\n", ms_last_error());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Truncated one-mode boson laboratory: minimal dynamical semigroups "
        "from regularised relative-bound-one perturbations"};
    app.require_subcommand(0, 1);

    SubState global;
    global.app = &app;
    add_common_options(global);

    std::map<std::string, SubState> subs;
    for (const char* name :
         {"verify", "evolve", "study", "counterexample"}) {
        SubState st;
        st.app = app.add_subcommand(
            name, std::string("run the ") + name + " command");
        subs.emplace(name, st);
        add_common_options(subs[name]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage errors are exit 2 by contract
    }

    std::string command;
    std::vector<const SubState*> layers{&global};
    for (auto& [name, st] : subs) {
        if (st.app->parsed()) {
            command = name;
            layers.push_back(&st);
        }
    }

    ms_run* run = ms_run_create();
    if (!run) {
        std::fprintf(stderr, "error: out of memory\n");
        return 2;
    }

    int rc = 0;
    for (const SubState* st : layers) {
        if (!st->manifest_path.empty() &&
            ms_run_load_manifest(run, st->manifest_path.c_str()) != MS_OK) {
            rc = fail_usage();
            break;
        }
        if (!st->config_path.empty() &&
            ms_run_load_file(run, st->config_path.c_str()) != MS_OK) {
            rc = fail_usage();
            break;
        }
        for (const auto& key : kKeys) {
            const auto it = st->values.find(key);
            if (it == st->values.end() ||
                st->app->count(flag_name(key)) == 0)
                continue;
            if (ms_run_set(run, key.c_str(), it->second.c_str()) != MS_OK) {
                rc = fail_usage();
                break;
            }
        }
        if (rc != 0) break;
        if (st->app->count("--strict-iii") > 0)
            ms_run_set(run, "strict_iii", "true");
        if (st->app->count("--require-markov") > 0)
            ms_run_set(run, "require_markov", "true");
        if (st->app->count("--generator") > 0) {
            const std::string fam =
                (st->generator == "H" || st->generator == "h") ? "h" : "full";
            ms_run_set(run, "family", fam.c_str());
        }
    }

    if (rc == 0) {
        // With no subcommand, replay the command recorded in the manifest.
        rc = ms_run_command(run, command.empty() ? nullptr : command.c_str());
        if (rc == 2) std::fprintf(stderr, "error: %s\n", ms_last_error());
    }
    ms_run_destroy(run);
    return rc;
}
