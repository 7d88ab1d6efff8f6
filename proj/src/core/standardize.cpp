#include "core/standardize.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace railenv {

Standardizer Standardizer::fit(const std::vector<LabeledSample>& train, size_t feature_count) {
    if (train.empty()) throw_input("cannot fit standardizer on an empty training set");

    Standardizer s;
    s.means_.assign(feature_count, 0.0);
    s.stds_.assign(feature_count, 1.0);
    s.constant_.assign(feature_count, false);

    for (size_t f = 0; f < feature_count; ++f) {
        double sum = 0.0;
        size_t n = 0;
        for (const auto& sample : train) {
            if (!sample.features.mask[f]) continue;
            sum += sample.features.values[f];
            ++n;
        }
        if (n == 0) {
            s.constant_[f] = true;  // never observed; transforms to 0
            continue;
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& sample : train) {
            if (!sample.features.mask[f]) continue;
            const double d = sample.features.values[f] - mean;
            ss += d * d;
        }
        const double std_dev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        s.means_[f] = mean;
        if (std_dev > 0.0) {
            s.stds_[f] = std_dev;
        } else {
            s.stds_[f] = 1.0;
            s.constant_[f] = true;
        }
    }
    return s;
}

std::vector<double> Standardizer::transform(const FeatureVector& fv) const {
    if (fv.values.size() != means_.size())
        throw_input("feature vector length does not match standardizer");
    std::vector<double> out(means_.size(), 0.0);
    for (size_t f = 0; f < means_.size(); ++f) {
        if (!fv.mask[f]) continue;  // imputed with the training mean
        out[f] = (fv.values[f] - means_[f]) / stds_[f];
    }
    return out;
}

Standardizer Standardizer::from_parts(std::vector<double> means, std::vector<double> stds,
                                      std::vector<bool> constant) {
    Standardizer s;
    s.means_ = std::move(means);
    s.stds_ = std::move(stds);
    s.constant_ = std::move(constant);
    return s;
}

}  // namespace railenv
