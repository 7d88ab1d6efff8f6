#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/context.hpp"
#include "core/errormodel.hpp"
#include "core/gbt.hpp"
#include "core/ingest.hpp"
#include "core/mlr.hpp"
#include "core/residuals.hpp"

namespace railenv {

enum class ClassifierKind { mlr, gbt };

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::gbt;
    size_t train_size = 2000;
    DatasetPolicy dataset_policy = DatasetPolicy::clear_only;
    MlrParams mlr;
    GbtParams gbt;
    size_t importance_repeats = 5;
};

struct SimulateConfig {
    bool tunnel_no_signal = true;
};

/// One environment segment of the synthetic scenario; segments repeat in
/// order until the journey ends.
struct SynthClassConfig {
    EnvironmentClass label = EnvironmentClass::open_sky_rural;
    double duration_s = 300.0;
    double cn0_base_dbhz = 45.0;
    double cn0_sigma_dbhz = 1.0;
    double error_mean_m = 0.0;
    double error_var_m2 = 1.0;
    bool stationary = false;  // train stopped (stations)
};

struct SynthConfig {
    int start_week = 2200;
    double start_sow = 172800.0;
    double duration_s = 1200.0;
    double rate_hz = 1.0;
    double origin_lat_deg = 43.6;
    double origin_lon_deg = 1.44;
    double height_m = 150.0;
    double speed_mps = 35.0;
    double heading_deg = 70.0;
    double curve_deg_per_km = 3.0;
    size_t n_gps = 24;
    size_t n_galileo = 0;
    double receiver_clock_amplitude_s = 2e-5;
    double receiver_clock_period_s = 1200.0;
    double cn0_elevation_gain_db = 6.0;
    std::vector<SynthClassConfig> classes;

    static std::vector<SynthClassConfig> default_classes();
};

struct PathsConfig {
    std::string obs;
    std::string nav;
    std::string truth;
    std::string labels;
    std::string out_dir = "out";

    // Derived defaults (out_dir/<name>) unless set explicitly.
    std::string residuals;
    std::string features;
    std::string model;
    std::string error_models;
    std::string stream;
};

struct PipelineConfig {
    ObsCodeConfig signals;
    ResidualConfig residuals;
    size_t feature_window = 1;  // odd; 1 disables windowing
    uint64_t master_seed = 42;
    ClassifierConfig classifier;
    FitConfig error_fit;
    SimulateConfig simulate;
    SynthConfig synth;
    PathsConfig paths;

    /// Stable hash of the canonical serialized form; embedded in every output.
    std::string hash() const;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json_text(const std::string& text, const std::string& context);
std::string config_to_json_text(const PipelineConfig& config);

/// Resolved output path helpers (create out_dir on demand).
std::string resolved_residuals_path(const PipelineConfig& c);
std::string resolved_features_path(const PipelineConfig& c);
std::string resolved_model_path(const PipelineConfig& c);
std::string resolved_error_models_path(const PipelineConfig& c);
std::string resolved_stream_path(const PipelineConfig& c);

}  // namespace railenv
