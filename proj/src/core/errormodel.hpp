#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/residuals.hpp"
#include "core/types.hpp"

namespace railenv {

/// Grouping key of one fitted Gaussian error model.
struct ModelKey {
    std::optional<EnvironmentClass> label;  // empty for the pooled fallback
    Constellation constellation = Constellation::gps;
    std::string band_code;

    friend auto operator<=>(const ModelKey&, const ModelKey&) = default;
};

std::string to_string(const ModelKey& key);

/// Robust (MCD) Gaussian model of the local error for one group.
struct GaussianErrorModel {
    ModelKey key;
    double mean_m = 0.0;
    double variance_m2 = 0.0;            // MCD scatter with consistency factor
    double classical_variance_m2 = 0.0;  // for comparison
    size_t sample_count = 0;
    double h_fraction = 0.75;
};

struct ErrorModelSet {
    std::map<ModelKey, GaussianErrorModel> models;
    std::optional<GaussianErrorModel> fallback;  // pooled over all records

    /// Group model, or the fallback for unknown keys.
    const GaussianErrorModel& resolve(const ModelKey& key) const;
};

struct FitConfig {
    double h_fraction = 0.75;
    size_t min_group_size = 50;
    bool group_by_class = true;  // false pools every class together per signal
};

struct FitReport {
    std::vector<std::pair<ModelKey, size_t>> skipped_small_groups;
};

/// 1-D MCD fit of epsilon per (class, constellation, band) group with
/// h = ceil(h_fraction * n); groups below the minimum size are served by the
/// pooled fallback model.
ErrorModelSet fit_error_models(const std::vector<ResidualRecord>& records, const FitConfig& config,
                               uint64_t seed, FitReport* report = nullptr);

/// One visible satellite slot of a simulation schedule.
struct ScheduleEntry {
    SatelliteId sat;
    std::string band_code;
    std::optional<EnvironmentClass> label;  // unlabeled slots resolve to the fallback model
};

struct ScheduleEpoch {
    GnssTime time;
    std::vector<ScheduleEntry> entries;
    bool no_signal = false;  // e.g. tunnel: emit marker instead of samples
};

struct SampledError {
    GnssTime time;
    SatelliteId sat;
    std::string band_code;
    std::optional<EnvironmentClass> label;
    std::optional<double> error_m;  // empty on no-signal epochs
};

/// One deterministic draw from a model at stream position (epoch, slot).
double sample_one_error(const GaussianErrorModel& model, uint64_t seed, uint64_t epoch_index,
                        uint64_t slot_index);

/// Temporally independent Gaussian stream: every value is drawn from the
/// resolved key's model with a sub-seed derived per (epoch, slot), so the
/// stream is identical for a given (seed, schedule) no matter the evaluation
/// order.
std::vector<SampledError> sample_errors(const ErrorModelSet& models,
                                        const std::vector<ScheduleEpoch>& schedule, uint64_t seed);

}  // namespace railenv
