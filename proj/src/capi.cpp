#include "sbs.h"

#include <memory>
#include <string>

#include "sbs/pipeline.hpp"
#include "sbs/util.hpp"

struct sbs_pipeline {
    std::unique_ptr<sbs::Pipeline> impl;
    sbs::PipelineConfig config;
    bool started = false;
    std::string last_error;
    std::vector<std::string> warnings;
};

namespace {

sbs_status capture(sbs_pipeline* p, const std::exception& e) {
    if (p) {
        p->last_error = e.what();
    }
    if (dynamic_cast<const sbs::ConfigError*>(&e)) {
        return SBS_ERR_CONFIG;
    }
    if (dynamic_cast<const sbs::DataError*>(&e)) {
        return SBS_ERR_DATA;
    }
    return SBS_ERR_INTERNAL;
}

}  // namespace

extern "C" {

const char* sbs_version(void) {
    static const std::string version = sbs::tool_version();
    return version.c_str();
}

sbs_status sbs_pipeline_open(const char* config_path, sbs_pipeline** out) {
    if (!out) {
        return SBS_ERR_CONFIG;
    }
    *out = nullptr;
    if (!config_path) {
        return SBS_ERR_CONFIG;
    }
    auto handle = std::make_unique<sbs_pipeline>();
    try {
        handle->config = sbs::PipelineConfig::load(config_path);
    } catch (const std::exception& e) {
        const sbs_status st = capture(handle.get(), e);
        *out = handle.release();
        return st;
    }
    *out = handle.release();
    return SBS_OK;
}

sbs_status sbs_pipeline_set_option(sbs_pipeline* p, const char* key, const char* value) {
    if (!p || !key || !value) {
        return SBS_ERR_CONFIG;
    }
    if (p->started) {
        p->last_error = "options must be set before the first stage runs";
        return SBS_ERR_CONFIG;
    }
    try {
        p->config.set_option(key, value);
        return SBS_OK;
    } catch (const std::exception& e) {
        return capture(p, e);
    }
}

sbs_status sbs_pipeline_run_stage(sbs_pipeline* p, const char* stage) {
    if (!p || !stage) {
        return SBS_ERR_CONFIG;
    }
    try {
        if (!p->impl) {
            p->impl = std::make_unique<sbs::Pipeline>(p->config);
        }
        p->started = true;
        const std::string name = stage;
        if (name == "preprocess") {
            p->impl->cmd_preprocess();
        } else if (name == "network") {
            p->impl->cmd_network();
        } else if (name == "score") {
            p->impl->cmd_score();
        } else if (name == "analyze") {
            p->impl->cmd_analyze();
        } else if (name == "run") {
            p->impl->cmd_run();
        } else {
            throw sbs::ConfigError("unknown stage '" + name + "'");
        }
        p->warnings = p->impl->warnings();
        return SBS_OK;
    } catch (const std::exception& e) {
        if (p->impl) {
            p->warnings = p->impl->warnings();
        }
        return capture(p, e);
    } catch (...) {
        p->last_error = "unknown internal error";
        return SBS_ERR_INTERNAL;
    }
}

const char* sbs_pipeline_last_error(const sbs_pipeline* p) {
    return p ? p->last_error.c_str() : "null pipeline handle";
}

size_t sbs_pipeline_warning_count(const sbs_pipeline* p) {
    return p ? p->warnings.size() : 0;
}

const char* sbs_pipeline_warning(const sbs_pipeline* p, size_t index) {
    if (!p || index >= p->warnings.size()) {
        return nullptr;
    }
    return p->warnings[index].c_str();
}

const char* sbs_pipeline_output_dir(const sbs_pipeline* p) {
    return p ? p->config.output_dir.c_str() : "";
}

void sbs_pipeline_close(sbs_pipeline* p) {
    delete p;
}

}  // extern "C"
