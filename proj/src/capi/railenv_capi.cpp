#include "railenv.h"

#include <cstring>
#include <exception>
#include <string>

#include "core/config.hpp"
#include "core/errormodel.hpp"
#include "core/errors.hpp"
#include "core/model_io.hpp"
#include "core/pipeline.hpp"

// Opaque handle definitions; the C surface owns plain heap copies.
struct railenv_config {
    railenv::PipelineConfig value;
};

struct railenv_error_models {
    railenv::ErrorModelSet value;
};

namespace {

thread_local std::string g_last_error;

railenv_status fail(railenv_status status, const char* message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
railenv_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return RAILENV_OK;
    } catch (const railenv::Error& e) {
        g_last_error = e.what();
        return static_cast<railenv_status>(static_cast<int>(e.status()));
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RAILENV_ERR_NUMERIC;
    } catch (...) {
        g_last_error = "unknown error";
        return RAILENV_ERR_NUMERIC;
    }
}

void copy_out(const std::string& text, char* buffer, size_t buffer_size) {
    if (!buffer || buffer_size == 0) return;
    const size_t n = std::min(buffer_size - 1, text.size());
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
}

railenv_status run_stage(const railenv_config* config, char* summary, size_t summary_size,
                         std::string (*stage)(const railenv::PipelineConfig&)) {
    if (!config) return fail(RAILENV_ERR_USAGE, "config handle is null");
    return guarded([&] {
        const std::string result = stage(config->value);
        copy_out(result, summary, summary_size);
    });
}

std::optional<railenv::ModelKey> make_key(const char* class_name, const char* constellation,
                                          const char* band) {
    if (!constellation || !band) return std::nullopt;
    const auto c = railenv::constellation_from_name(constellation);
    if (!c) return std::nullopt;
    railenv::ModelKey key;
    key.constellation = *c;
    key.band_code = band;
    if (class_name && *class_name) {
        const auto label = railenv::parse_class(class_name);
        if (!label) return std::nullopt;  // unknown class falls through to the fallback
        key.label = label;
    }
    return key;
}

}  // namespace

extern "C" {

const char* railenv_version(void) { return "railenv 1.0.0"; }

const char* railenv_last_error(void) { return g_last_error.c_str(); }

railenv_status railenv_config_load(const char* path, railenv_config** out_config) {
    if (!path || !out_config) return fail(RAILENV_ERR_USAGE, "null argument");
    *out_config = nullptr;
    return guarded([&] { *out_config = new railenv_config{railenv::load_config(path)}; });
}

railenv_status railenv_config_from_json(const char* json_text, railenv_config** out_config) {
    if (!json_text || !out_config) return fail(RAILENV_ERR_USAGE, "null argument");
    *out_config = nullptr;
    return guarded([&] {
        *out_config =
            new railenv_config{railenv::config_from_json_text(json_text, "inline config")};
    });
}

void railenv_config_free(railenv_config* config) { delete config; }

railenv_status railenv_config_set_seed(railenv_config* config, uint64_t seed) {
    if (!config) return fail(RAILENV_ERR_USAGE, "config handle is null");
    config->value.master_seed = seed;
    return RAILENV_OK;
}

railenv_status railenv_config_set_out_dir(railenv_config* config, const char* out_dir) {
    if (!config || !out_dir) return fail(RAILENV_ERR_USAGE, "null argument");
    config->value.paths.out_dir = out_dir;
    return RAILENV_OK;
}

railenv_status railenv_config_hash(const railenv_config* config, char* buffer,
                                   size_t buffer_size) {
    if (!config || !buffer) return fail(RAILENV_ERR_USAGE, "null argument");
    return guarded([&] { copy_out(config->value.hash(), buffer, buffer_size); });
}

railenv_status railenv_run_extract(const railenv_config* config, char* summary,
                                   size_t summary_size) {
    return run_stage(config, summary, summary_size, railenv::run_extract);
}
railenv_status railenv_run_featurize(const railenv_config* config, char* summary,
                                     size_t summary_size) {
    return run_stage(config, summary, summary_size, railenv::run_featurize);
}
railenv_status railenv_run_train(const railenv_config* config, char* summary,
                                 size_t summary_size) {
    return run_stage(config, summary, summary_size, railenv::run_train);
}
railenv_status railenv_run_evaluate(const railenv_config* config, char* summary,
                                    size_t summary_size) {
    return run_stage(config, summary, summary_size, railenv::run_evaluate);
}
railenv_status railenv_run_fit_errors(const railenv_config* config, char* summary,
                                      size_t summary_size) {
    return run_stage(config, summary, summary_size, railenv::run_fit_errors);
}
railenv_status railenv_run_simulate(const railenv_config* config, char* summary,
                                    size_t summary_size) {
    return run_stage(config, summary, summary_size, railenv::run_simulate);
}
railenv_status railenv_run_synth(const railenv_config* config, char* summary,
                                 size_t summary_size) {
    return run_stage(config, summary, summary_size, railenv::run_synth);
}

railenv_status railenv_error_models_load(const char* path, railenv_error_models** out_models) {
    if (!path || !out_models) return fail(RAILENV_ERR_USAGE, "null argument");
    *out_models = nullptr;
    return guarded(
        [&] { *out_models = new railenv_error_models{railenv::load_error_models(path)}; });
}

void railenv_error_models_free(railenv_error_models* models) { delete models; }

railenv_status railenv_error_models_query(const railenv_error_models* models,
                                          const char* class_name, const char* constellation,
                                          const char* band, double* mean_m, double* var_m2) {
    if (!models || !mean_m || !var_m2) return fail(RAILENV_ERR_USAGE, "null argument");
    const auto key = make_key(class_name, constellation, band);
    if (!key) return fail(RAILENV_ERR_USAGE, "bad model key");
    return guarded([&] {
        const railenv::GaussianErrorModel& m = models->value.resolve(*key);
        *mean_m = m.mean_m;
        *var_m2 = m.variance_m2;
    });
}

railenv_status railenv_sample_error(const railenv_error_models* models, const char* class_name,
                                    const char* constellation, const char* band, uint64_t seed,
                                    uint64_t epoch_index, uint64_t slot_index, double* error_m) {
    if (!models || !error_m) return fail(RAILENV_ERR_USAGE, "null argument");
    const auto key = make_key(class_name, constellation, band);
    if (!key) return fail(RAILENV_ERR_USAGE, "bad model key");
    return guarded([&] {
        const railenv::GaussianErrorModel& m = models->value.resolve(*key);
        *error_m = railenv::sample_one_error(m, seed, epoch_index, slot_index);
    });
}

}  // extern "C"
