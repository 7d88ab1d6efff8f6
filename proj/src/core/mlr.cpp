#include "core/mlr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace railenv {

namespace {

void softmax_row(std::vector<double>& scores) {
    double max_score = -std::numeric_limits<double>::infinity();
    for (double s : scores) max_score = std::max(max_score, s);
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max_score);
        sum += s;
    }
    for (double& s : scores) s /= sum;
}

std::vector<double> scores_for(const MlrModel& m, const std::vector<double>& x) {
    std::vector<double> scores(m.n_classes);
    for (size_t k = 0; k < m.n_classes; ++k) {
        double s = m.bias[k];
        const double* w = m.weights.data() + k * m.n_features;
        for (size_t f = 0; f < m.n_features; ++f) s += w[f] * x[f];
        scores[k] = s;
    }
    return scores;
}

}  // namespace

double mlr_objective(const std::vector<std::vector<double>>& x, const std::vector<size_t>& y,
                     size_t n_classes, const std::vector<double>& weights,
                     const std::vector<double>& bias, double lambda,
                     std::vector<double>* grad_weights, std::vector<double>* grad_bias) {
    const size_t n = x.size();
    const size_t n_features = x.empty() ? 0 : x[0].size();
    if (grad_weights) grad_weights->assign(weights.size(), 0.0);
    if (grad_bias) grad_bias->assign(bias.size(), 0.0);

    double nll = 0.0;
    std::vector<double> p(n_classes);
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < n_classes; ++k) {
            double s = bias[k];
            const double* w = weights.data() + k * n_features;
            for (size_t f = 0; f < n_features; ++f) s += w[f] * x[i][f];
            p[k] = s;
        }
        softmax_row(p);
        nll -= std::log(std::max(p[y[i]], 1e-300));
        if (grad_weights) {
            for (size_t k = 0; k < n_classes; ++k) {
                const double coeff = (p[k] - (k == y[i] ? 1.0 : 0.0)) / static_cast<double>(n);
                double* gw = grad_weights->data() + k * n_features;
                for (size_t f = 0; f < n_features; ++f) gw[f] += coeff * x[i][f];
                (*grad_bias)[k] += coeff;
            }
        }
    }
    double penalty = 0.0;
    for (double w : weights) penalty += w * w;
    const double objective = nll / static_cast<double>(n) + 0.5 * lambda * penalty;
    if (grad_weights) {
        for (size_t j = 0; j < weights.size(); ++j) (*grad_weights)[j] += lambda * weights[j];
    }
    if (!std::isfinite(objective)) throw_numeric("non-finite MLR objective");
    return objective;
}

namespace {

struct FitResult {
    MlrModel model;
    std::vector<double> loss_trace;
};

FitResult fit_for_lambda(const std::vector<std::vector<double>>& x, const std::vector<size_t>& y,
                         size_t n_classes, double lambda, const MlrParams& params) {
    FitResult fit;
    MlrModel& m = fit.model;
    m.n_classes = n_classes;
    m.n_features = x.empty() ? 0 : x[0].size();
    m.lambda = lambda;
    m.weights.assign(n_classes * m.n_features, 0.0);
    m.bias.assign(n_classes, 0.0);

    std::vector<double> gw, gb;
    double loss = mlr_objective(x, y, n_classes, m.weights, m.bias, lambda, &gw, &gb);
    fit.loss_trace.push_back(loss);
    double step = 1.0;

    for (size_t it = 0; it < params.max_iterations; ++it) {
        double grad_norm2 = 0.0;
        for (double g : gw) grad_norm2 += g * g;
        for (double g : gb) grad_norm2 += g * g;
        if (grad_norm2 < params.gradient_tolerance * params.gradient_tolerance) break;

        // Backtracking line search keeps the trace monotone.
        std::vector<double> w_try(m.weights.size()), b_try(m.bias.size());
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            for (size_t j = 0; j < m.weights.size(); ++j) w_try[j] = m.weights[j] - step * gw[j];
            for (size_t j = 0; j < m.bias.size(); ++j) b_try[j] = m.bias[j] - step * gb[j];
            const double candidate =
                mlr_objective(x, y, n_classes, w_try, b_try, lambda, nullptr, nullptr);
            if (candidate <= loss - 1e-4 * step * grad_norm2) {
                m.weights.swap(w_try);
                m.bias.swap(b_try);
                loss = candidate;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow; gradient is numerically flat
        fit.loss_trace.push_back(loss);
        step = std::min(step * 2.0, 1024.0);
        mlr_objective(x, y, n_classes, m.weights, m.bias, lambda, &gw, &gb);
    }
    return fit;
}

}  // namespace

MlrModel mlr_train(const std::vector<std::vector<double>>& x, const std::vector<size_t>& y,
                   size_t n_classes, const MlrParams& params, uint64_t seed, MlrReport* report) {
    if (x.size() != y.size() || x.empty()) throw_input("mlr_train: bad training shape");
    if (n_classes < 2) throw_input("mlr_train: need at least 2 classes");

    std::vector<size_t> per_class(n_classes, 0);
    for (size_t label : y) {
        if (label >= n_classes) throw_input("mlr_train: label out of range");
        ++per_class[label];
    }
    MlrReport local_report;
    MlrReport& rep = report ? *report : local_report;
    for (size_t k = 0; k < n_classes; ++k) {
        if (per_class[k] == 0) throw_input("mlr_train: class without samples");
        if (per_class[k] < rep.class_count_warning_threshold)
            rep.warnings.push_back("class " + std::to_string(k) + " has only " +
                                   std::to_string(per_class[k]) + " samples");
    }

    // 5-fold cross-validation over the lambda grid.
    Rng rng(derive_seed(seed, /*stream=*/0xc2));
    const auto order = shuffled_indices(x.size(), rng);
    const size_t folds = std::min<size_t>(params.cv_folds, x.size());

    double best_lambda = params.lambda_grid.front();
    double best_accuracy = -1.0;
    for (double lambda : params.lambda_grid) {
        double accuracy_sum = 0.0;
        for (size_t fold = 0; fold < folds; ++fold) {
            std::vector<std::vector<double>> x_train, x_val;
            std::vector<size_t> y_train, y_val;
            for (size_t i = 0; i < order.size(); ++i) {
                if (i % folds == fold) {
                    x_val.push_back(x[order[i]]);
                    y_val.push_back(y[order[i]]);
                } else {
                    x_train.push_back(x[order[i]]);
                    y_train.push_back(y[order[i]]);
                }
            }
            if (x_val.empty() || x_train.empty()) continue;
            bool trainable = true;
            std::vector<size_t> counts(n_classes, 0);
            for (size_t label : y_train) ++counts[label];
            for (size_t c : counts)
                if (c == 0) trainable = false;
            if (!trainable) continue;

            const FitResult fit = fit_for_lambda(x_train, y_train, n_classes, lambda, params);
            size_t correct = 0;
            for (size_t i = 0; i < x_val.size(); ++i) {
                if (mlr_predict(fit.model, x_val[i]).class_index == y_val[i]) ++correct;
            }
            accuracy_sum += static_cast<double>(correct) / static_cast<double>(x_val.size());
        }
        const double mean_accuracy = accuracy_sum / static_cast<double>(folds);
        rep.cv.push_back({lambda, mean_accuracy});
        if (mean_accuracy >= best_accuracy) {  // ties broken toward larger lambda
            best_accuracy = mean_accuracy;
            best_lambda = lambda;
        }
    }
    rep.chosen_lambda = best_lambda;

    FitResult final_fit = fit_for_lambda(x, y, n_classes, best_lambda, params);
    rep.final_loss_trace = std::move(final_fit.loss_trace);
    return final_fit.model;
}

Prediction mlr_predict(const MlrModel& model, const std::vector<double>& x) {
    if (x.size() != model.n_features) throw_input("mlr_predict: feature length mismatch");
    Prediction p;
    p.probabilities = scores_for(model, x);
    softmax_row(p.probabilities);
    p.class_index = 0;
    for (size_t k = 1; k < model.n_classes; ++k) {
        if (p.probabilities[k] > p.probabilities[p.class_index]) p.class_index = k;
    }
    return p;
}

}  // namespace railenv
