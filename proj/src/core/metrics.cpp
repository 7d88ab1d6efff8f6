#include "core/metrics.hpp"

#include <algorithm>
#include <set>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace railenv {

size_t ConfusionMatrix::total() const {
    size_t t = 0;
    for (size_t c : counts) t += c;
    return t;
}

double ConfusionMatrix::accuracy() const {
    const size_t t = total();
    if (t == 0) return 0.0;
    size_t diag = 0;
    for (size_t k = 0; k < classes.size(); ++k) diag += at(k, k);
    return static_cast<double>(diag) / static_cast<double>(t);
}

double ConfusionMatrix::recall(size_t class_idx) const {
    size_t row = 0;
    for (size_t j = 0; j < classes.size(); ++j) row += at(class_idx, j);
    return row == 0 ? 0.0 : static_cast<double>(at(class_idx, class_idx)) / static_cast<double>(row);
}

double ConfusionMatrix::precision(size_t class_idx) const {
    size_t col = 0;
    for (size_t i = 0; i < classes.size(); ++i) col += at(i, class_idx);
    return col == 0 ? 0.0 : static_cast<double>(at(class_idx, class_idx)) / static_cast<double>(col);
}

ConfusionMatrix confusion(const std::vector<EnvironmentClass>& truth,
                          const std::vector<EnvironmentClass>& predicted,
                          const std::vector<EnvironmentClass>& classes) {
    if (truth.size() != predicted.size())
        throw_input("confusion: label vectors have different lengths");
    ConfusionMatrix m;
    m.classes = classes;
    m.counts.assign(classes.size() * classes.size(), 0);
    auto index_of = [&](EnvironmentClass c) {
        auto it = std::find(classes.begin(), classes.end(), c);
        if (it == classes.end())
            throw_input("confusion: label '" + class_name(c) + "' not in class list");
        return static_cast<size_t>(it - classes.begin());
    };
    for (size_t i = 0; i < truth.size(); ++i)
        ++m.counts[index_of(truth[i]) * classes.size() + index_of(predicted[i])];
    return m;
}

ConfusionMatrix confusion(const std::vector<EnvironmentClass>& truth,
                          const std::vector<EnvironmentClass>& predicted) {
    std::set<EnvironmentClass> seen(truth.begin(), truth.end());
    seen.insert(predicted.begin(), predicted.end());
    return confusion(truth, predicted, {seen.begin(), seen.end()});
}

ImportanceReport permutation_importance(
    const std::function<EnvironmentClass(const FeatureVector&)>& predict,
    const std::vector<LabeledSample>& test, const std::vector<std::string>& feature_names,
    size_t n_repeats, uint64_t seed) {
    if (test.empty()) throw_input("permutation importance needs a non-empty test set");

    auto accuracy_of = [&](const std::vector<LabeledSample>& samples) {
        size_t correct = 0;
        for (const auto& s : samples)
            if (predict(s.features) == s.label) ++correct;
        return static_cast<double>(correct) / static_cast<double>(samples.size());
    };

    ImportanceReport report;
    report.baseline_accuracy = accuracy_of(test);

    std::vector<LabeledSample> permuted = test;
    for (size_t f = 0; f < feature_names.size(); ++f) {
        double drop_sum = 0.0;
        for (size_t rep = 0; rep < n_repeats; ++rep) {
            Rng rng(derive_seed(seed, f, rep));
            const auto perm = shuffled_indices(test.size(), rng);
            for (size_t i = 0; i < test.size(); ++i) {
                permuted[i].features.values[f] = test[perm[i]].features.values[f];
                permuted[i].features.mask[f] = test[perm[i]].features.mask[f];
            }
            drop_sum += report.baseline_accuracy - accuracy_of(permuted);
        }
        // Restore the column before moving on.
        for (size_t i = 0; i < test.size(); ++i) {
            permuted[i].features.values[f] = test[i].features.values[f];
            permuted[i].features.mask[f] = test[i].features.mask[f];
        }
        report.entries.push_back(
            {feature_names[f], f, drop_sum / static_cast<double>(n_repeats)});
    }
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const ImportanceEntry& a, const ImportanceEntry& b) {
                         return a.mean_accuracy_drop > b.mean_accuracy_drop;
                     });
    return report;
}

}  // namespace railenv
