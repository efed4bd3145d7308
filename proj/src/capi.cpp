#include "memeclf.h"

#include <functional>
#include <new>
#include <string>

#include "memeclf/config.hpp"
#include "memeclf/errors.hpp"
#include "memeclf/runner.hpp"

using memeclf::Config;

struct memeclf_config {
    Config config;
    std::string last_read; // backing storage for memeclf_config_get
};

namespace {

thread_local std::string g_last_error;

int guard(const std::function<void()>& body) {
    try {
        body();
        g_last_error.clear();
        return MEMECLF_OK;
    } catch (const memeclf::Error& e) {
        g_last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        g_last_error = std::string("internal error: ") + e.what();
        return MEMECLF_E_INTERNAL;
    }
}

} // namespace

extern "C" {

const char* memeclf_version(void) { return memeclf::version_string(); }

const char* memeclf_last_error(void) { return g_last_error.c_str(); }

memeclf_config* memeclf_config_create(void) { return new (std::nothrow) memeclf_config(); }

void memeclf_config_destroy(memeclf_config* cfg) { delete cfg; }

int memeclf_config_load_file(memeclf_config* cfg, const char* path) {
    if (!cfg || !path) {
        g_last_error = "null argument";
        return MEMECLF_E_CONFIG;
    }
    return guard([&] { cfg->config.load_file(path); });
}

int memeclf_config_set(memeclf_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) {
        g_last_error = "null argument";
        return MEMECLF_E_CONFIG;
    }
    return guard([&] { cfg->config.set(key, value); });
}

const char* memeclf_config_get(memeclf_config* cfg, const char* key) {
    if (!cfg || !key || !cfg->config.has(key)) return nullptr;
    cfg->last_read = cfg->config.get_string(key);
    return cfg->last_read.c_str();
}

int memeclf_run(const char* command, const memeclf_config* cfg, const char* out_dir) {
    if (!command || !cfg) {
        g_last_error = "null argument";
        return MEMECLF_E_CONFIG;
    }
    Config effective = cfg->config;
    if (out_dir && *out_dir) effective.set("run.out", out_dir);
    std::string message;
    const int code = memeclf::run_command(command, std::move(effective), &message);
    g_last_error = message;
    return code;
}

} // extern "C"
