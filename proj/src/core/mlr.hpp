#pragma once

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace railenv {

/// L2-penalized multiclass logistic regression.
struct MlrModel {
    size_t n_classes = 0;
    size_t n_features = 0;
    std::vector<double> weights;  // row-major (n_classes x n_features)
    std::vector<double> bias;     // n_classes
    double lambda = 0.0;

    double weight(size_t k, size_t f) const { return weights[k * n_features + f]; }
};

struct MlrParams {
    std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
    size_t max_iterations = 300;
    size_t cv_folds = 5;
    double gradient_tolerance = 1e-8;
};

struct CvCell {
    double lambda = 0.0;
    double mean_accuracy = 0.0;
};

struct MlrReport {
    std::vector<CvCell> cv;       // one entry per lambda in grid order
    double chosen_lambda = 0.0;
    std::vector<double> final_loss_trace;  // training objective per accepted step
    size_t class_count_warning_threshold = 10;
    std::vector<std::string> warnings;
};

/// Softmax cross-entropy + (lambda/2)*||W||^2, minimized by full-batch descent
/// with a backtracking line search; the loss trace is monotone non-increasing.
/// lambda is chosen over the grid by mean 5-fold CV accuracy (ties toward the
/// larger lambda), then the model is refit on all training rows.
MlrModel mlr_train(const std::vector<std::vector<double>>& x, const std::vector<size_t>& y,
                   size_t n_classes, const MlrParams& params, uint64_t seed,
                   MlrReport* report = nullptr);

struct Prediction {
    size_t class_index = 0;
    std::vector<double> probabilities;
};

Prediction mlr_predict(const MlrModel& model, const std::vector<double>& x);

/// Objective and analytic gradient at (weights, bias); exposed so tests can
/// verify the gradient against finite differences.
double mlr_objective(const std::vector<std::vector<double>>& x, const std::vector<size_t>& y,
                     size_t n_classes, const std::vector<double>& weights,
                     const std::vector<double>& bias, double lambda,
                     std::vector<double>* grad_weights = nullptr,
                     std::vector<double>* grad_bias = nullptr);

}  // namespace railenv
