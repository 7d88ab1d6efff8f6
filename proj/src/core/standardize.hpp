#pragma once

#include <vector>

#include "core/context.hpp"

namespace railenv {

/// Per-feature standardization fitted on the training split only. Masked
/// entries are excluded from the statistics and imputed with the training
/// mean at transform time (standardized value 0).
class Standardizer {
  public:
    static Standardizer fit(const std::vector<LabeledSample>& train, size_t feature_count);

    std::vector<double> transform(const FeatureVector& fv) const;

    size_t feature_count() const { return means_.size(); }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& stds() const { return stds_; }
    const std::vector<bool>& constant_flags() const { return constant_; }

    static Standardizer from_parts(std::vector<double> means, std::vector<double> stds,
                                   std::vector<bool> constant);

  private:
    std::vector<double> means_;
    std::vector<double> stds_;     // zero stds replaced by 1, flagged constant
    std::vector<bool> constant_;
};

}  // namespace railenv
