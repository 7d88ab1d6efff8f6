#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/context.hpp"

namespace railenv {

struct ConfusionMatrix {
    std::vector<EnvironmentClass> classes;
    std::vector<size_t> counts;  // row-major, true class x predicted class

    size_t at(size_t true_idx, size_t pred_idx) const {
        return counts[true_idx * classes.size() + pred_idx];
    }
    size_t total() const;
    double accuracy() const;
    double recall(size_t class_idx) const;
    double precision(size_t class_idx) const;
};

/// Counts over an explicit class list; labels outside the list are an error.
ConfusionMatrix confusion(const std::vector<EnvironmentClass>& truth,
                          const std::vector<EnvironmentClass>& predicted,
                          const std::vector<EnvironmentClass>& classes);

/// Class list derived from the union of observed labels.
ConfusionMatrix confusion(const std::vector<EnvironmentClass>& truth,
                          const std::vector<EnvironmentClass>& predicted);

struct ImportanceEntry {
    std::string feature;
    size_t feature_index = 0;
    double mean_accuracy_drop = 0.0;
};

struct ImportanceReport {
    double baseline_accuracy = 0.0;
    std::vector<ImportanceEntry> entries;  // sorted by descending drop
};

/// Mean accuracy drop over n_repeats seeded permutations of each feature
/// column (values and masks move together).
ImportanceReport permutation_importance(
    const std::function<EnvironmentClass(const FeatureVector&)>& predict,
    const std::vector<LabeledSample>& test, const std::vector<std::string>& feature_names,
    size_t n_repeats, uint64_t seed);

}  // namespace railenv
