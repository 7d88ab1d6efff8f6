#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/context.hpp"
#include "core/errormodel.hpp"
#include "core/gbt.hpp"
#include "core/mlr.hpp"
#include "core/standardize.hpp"

namespace railenv {

/// A persisted classification pipeline: schema + standardizer + model.
struct TrainedClassifier {
    std::string schema_hash;
    std::vector<std::string> feature_names;
    std::vector<EnvironmentClass> classes;
    Standardizer standardizer;
    std::optional<MlrModel> mlr;
    std::optional<GbtModel> gbt;

    Prediction predict(const FeatureVector& fv) const;
    EnvironmentClass predict_class(const FeatureVector& fv) const;
};

void save_model(const std::string& path, const TrainedClassifier& model,
                const std::string& config_hash, const MlrReport* cv_report = nullptr);
TrainedClassifier load_model(const std::string& path);

void save_error_models(const std::string& path, const ErrorModelSet& set,
                       const std::string& config_hash);
ErrorModelSet load_error_models(const std::string& path);

}  // namespace railenv
