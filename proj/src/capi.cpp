#include "minsemi.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "minsemi/runner.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what ? what : "unknown"; }

}  // namespace

struct ms_run {
    minsemi::RunConfig cfg;
    std::string manifest_command;
};

extern "C" {

const char* ms_version(void) { return MINSEMI_VERSION; }

const char* ms_last_error(void) { return g_last_error.c_str(); }

ms_run* ms_run_create(void) {
    g_last_error.clear();
    return new (std::nothrow) ms_run;
}

void ms_run_destroy(ms_run* run) { delete run; }

int ms_run_load_file(ms_run* run, const char* path) {
    if (!run || !path) {
        set_error("ms_run_load_file: null argument");
        return MS_ERROR;
    }
    try {
        minsemi::apply_config_file(run->cfg, path);
        g_last_error.clear();
        return MS_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return MS_ERROR;
    }
}

int ms_run_load_manifest(ms_run* run, const char* path) {
    if (!run || !path) {
        set_error("ms_run_load_manifest: null argument");
        return MS_ERROR;
    }
    try {
        run->manifest_command = minsemi::load_manifest(run->cfg, path);
        g_last_error.clear();
        return MS_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return MS_ERROR;
    }
}

int ms_run_set(ms_run* run, const char* key, const char* value) {
    if (!run || !key || !value) {
        set_error("ms_run_set: null argument");
        return MS_ERROR;
    }
    try {
        minsemi::apply_override(run->cfg, key, value);
        g_last_error.clear();
        return MS_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return MS_ERROR;
    }
}

int ms_run_get(const ms_run* run, const char* key, char* buf, size_t cap) {
    if (!run || !key || !buf) {
        set_error("ms_run_get: null argument");
        return MS_ERROR;
    }
    try {
        const std::string value = minsemi::read_key(run->cfg, key);
        if (value.size() + 1 > cap) {
            g_last_error = "ms_run_get: buffer too small for key '" +
                           std::string(key) + "' (need " +
                           std::to_string(value.size() + 1) + " bytes)";
            return MS_ERROR;
        }
        std::memcpy(buf, value.c_str(), value.size() + 1);
        g_last_error.clear();
        return MS_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return MS_ERROR;
    }
}

int ms_run_command(ms_run* run, const char* command) {
    if (!run) {
        set_error("ms_run_command: null handle");
        return 2;
    }
    const std::string cmd =
        (command && *command) ? command : run->manifest_command;
    if (cmd.empty()) {
        set_error(
            "ms_run_command: no command given and none recorded from a "
            "manifest");
        return 2;
    }
    try {
        g_last_error.clear();
        return minsemi::run_command(cmd, run->cfg);
    } catch (const std::exception& e) {
        set_error(e.what());
        return 2;
    }
}

}  // extern "C"
