#pragma once

#include <cstdint>
#include <vector>

#include "core/mlr.hpp"  // Prediction

namespace railenv {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf weight, shrinkage already applied
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double eval(const std::vector<double>& x) const;
    bool empty() const { return nodes.empty(); }
};

struct GbtParams {
    size_t n_rounds = 200;
    int max_depth = 4;
    double learning_rate = 0.1;
    size_t min_leaf = 5;
    double reg_lambda = 1.0;  // leaf weight regularizer of the boosting objective
};

/// Per-class additive ensembles of regression trees over softmax scores.
struct GbtModel {
    size_t n_classes = 0;
    size_t n_features = 0;
    std::vector<double> base_scores;               // log class priors after training
    std::vector<std::vector<RegressionTree>> rounds;  // rounds[r][class]
    GbtParams params;
};

struct GbtReport {
    std::vector<double> loss_per_round;  // index 0 = before any tree
};

/// Second-order multiclass gradient boosting with exact greedy axis-aligned
/// splits: per round one regression tree per class is fitted on the softmax
/// gradient/hessian pairs and shrunk by the learning rate.
GbtModel gbt_train(const std::vector<std::vector<double>>& x, const std::vector<size_t>& y,
                   size_t n_classes, const GbtParams& params, uint64_t seed,
                   GbtReport* report = nullptr);

Prediction gbt_predict(const GbtModel& model, const std::vector<double>& x);

}  // namespace railenv
