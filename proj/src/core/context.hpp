#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/geodesy.hpp"
#include "core/ingest.hpp"
#include "core/types.hpp"

namespace railenv {

/// mean/min/max/unbiased variance plus biased-moment skewness and kurtosis.
/// Skewness needs n >= 3, kurtosis n >= 4; both are masked for degenerate
/// (zero-variance) samples.
struct SampleStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;
};

SampleStats sample_stats(const std::vector<double>& values);

/// Ordered feature names derived from the (constellation, band) configuration.
/// The order is part of any persisted model.
class FeatureSchema {
  public:
    static FeatureSchema build(const std::vector<std::pair<Constellation, std::string>>& signals);

    const std::vector<std::string>& names() const { return names_; }
    size_t size() const { return names_.size(); }
    const std::vector<std::pair<Constellation, std::string>>& signals() const { return signals_; }
    const std::vector<Constellation>& constellations() const { return constellations_; }

    /// Stable content hash (version + names).
    std::string hash() const;

    static constexpr const char* version = "feature-schema-v1";

  private:
    std::vector<std::string> names_;
    std::vector<std::pair<Constellation, std::string>> signals_;
    std::vector<Constellation> constellations_;
};

/// Hash of an explicit name list (must agree with FeatureSchema::hash).
std::string schema_hash_from_names(const std::vector<std::string>& names);

struct FeatureVector {
    GnssTime time;
    std::vector<double> values;  // schema length; masked entries hold 0
    std::vector<bool> mask;      // true = value present
};

struct LabeledSample {
    FeatureVector features;
    EnvironmentClass label;
};

/// Per-satellite/band geometry for one epoch, keyed like the observations.
struct EpochGeometry {
    std::map<SatelliteId, AzEl> look;
};

/// Statistics across the satellites visible above the cutoff at one epoch.
/// DOPs come from the 4-state unit line-of-sight matrix and are masked when
/// fewer than 4 satellites are visible for a constellation.
FeatureVector featurize_epoch(const ObservationEpoch& epoch, const EpochGeometry& geometry,
                              const FeatureSchema& schema, double elevation_cutoff_rad);

enum class DatasetPolicy { clear_only, all_classes };

struct DatasetReport {
    std::map<EnvironmentClass, size_t> per_class;
    size_t dropped_unlabeled = 0;
    size_t dropped_mixed = 0;
};

struct Dataset {
    std::vector<LabeledSample> samples;
    DatasetReport report;
};

/// Pair feature vectors with interval labels under the given policy.
Dataset build_dataset(const std::vector<FeatureVector>& features,
                      const std::vector<std::optional<EnvironmentClass>>& labels,
                      DatasetPolicy policy);

struct Split {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> test;
};

/// Seeded uniform shuffle then split; train/test are disjoint and exhaustive.
Split split_dataset(const std::vector<LabeledSample>& dataset, size_t train_size, uint64_t seed);

}  // namespace railenv
