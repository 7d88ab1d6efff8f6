#include "core/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"

namespace railenv {

double RegressionTree::eval(const std::vector<double>& x) const {
    if (nodes.empty()) return 0.0;
    int idx = 0;
    while (nodes[static_cast<size_t>(idx)].feature >= 0) {
        const TreeNode& node = nodes[static_cast<size_t>(idx)];
        idx = x[static_cast<size_t>(node.feature)] < node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<size_t>(idx)].value;
}

namespace {

struct NodeStats {
    double g = 0.0;
    double h = 0.0;
    size_t count = 0;
};

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

double leaf_score(double g, double h, double reg_lambda) { return -g / (h + reg_lambda); }

double split_objective(double g, double h, double reg_lambda) {
    return g * g / (h + reg_lambda);
}

/// One tree on gradient/hessian targets. Level-wise growth; per level each
/// feature is scanned once in globally pre-sorted order.
RegressionTree build_tree(const std::vector<std::vector<double>>& x,
                          const std::vector<double>& grad, const std::vector<double>& hess,
                          const std::vector<std::vector<int>>& sorted_by_feature,
                          const GbtParams& params) {
    const size_t n = x.size();
    const size_t n_features = x.empty() ? 0 : x[0].size();

    RegressionTree tree;
    NodeStats root;
    for (size_t i = 0; i < n; ++i) {
        root.g += grad[i];
        root.h += hess[i];
        ++root.count;
    }
    tree.nodes.push_back({});  // provisional root
    std::vector<int> node_of(n, 0);
    std::vector<int> frontier = {0};
    std::vector<NodeStats> stats = {root};  // indexed by node id

    for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
        std::vector<SplitChoice> best(tree.nodes.size());
        std::vector<char> in_frontier(tree.nodes.size(), 0);
        for (int id : frontier) in_frontier[static_cast<size_t>(id)] = 1;

        std::vector<NodeStats> left(tree.nodes.size());
        std::vector<double> last_value(tree.nodes.size(), 0.0);
        std::vector<char> has_left(tree.nodes.size(), 0);

        for (size_t f = 0; f < n_features; ++f) {
            for (int id : frontier) {
                left[static_cast<size_t>(id)] = {};
                has_left[static_cast<size_t>(id)] = 0;
            }
            for (int i : sorted_by_feature[f]) {
                const int id = node_of[static_cast<size_t>(i)];
                if (!in_frontier[static_cast<size_t>(id)]) continue;
                const double v = x[static_cast<size_t>(i)][f];
                NodeStats& l = left[static_cast<size_t>(id)];
                const NodeStats& total = stats[static_cast<size_t>(id)];
                if (has_left[static_cast<size_t>(id)] && v > last_value[static_cast<size_t>(id)] &&
                    l.count >= params.min_leaf && total.count - l.count >= params.min_leaf) {
                    const double gain =
                        0.5 * (split_objective(l.g, l.h, params.reg_lambda) +
                               split_objective(total.g - l.g, total.h - l.h, params.reg_lambda) -
                               split_objective(total.g, total.h, params.reg_lambda));
                    SplitChoice& b = best[static_cast<size_t>(id)];
                    if (gain > b.gain + 1e-12) {
                        b.gain = gain;
                        b.feature = static_cast<int>(f);
                        b.threshold = 0.5 * (last_value[static_cast<size_t>(id)] + v);
                    }
                }
                l.g += grad[static_cast<size_t>(i)];
                l.h += hess[static_cast<size_t>(i)];
                ++l.count;
                last_value[static_cast<size_t>(id)] = v;
                has_left[static_cast<size_t>(id)] = 1;
            }
        }

        // Realize the splits; unsplit frontier nodes become leaves.
        std::vector<int> next_frontier;
        for (int id : frontier) {
            const SplitChoice& b = best[static_cast<size_t>(id)];
            TreeNode& node = tree.nodes[static_cast<size_t>(id)];
            const NodeStats& total = stats[static_cast<size_t>(id)];
            if (b.feature < 0 || !(b.gain > 0.0)) {
                node.feature = -1;
                node.value = params.learning_rate * leaf_score(total.g, total.h, params.reg_lambda);
                continue;
            }
            node.feature = b.feature;
            node.threshold = b.threshold;
            node.left = static_cast<int>(tree.nodes.size());
            node.right = node.left + 1;
            tree.nodes.push_back({});
            tree.nodes.push_back({});
            stats.push_back({});
            stats.push_back({});
            next_frontier.push_back(node.left);
            next_frontier.push_back(node.right);
        }

        // Reassign samples of split nodes and accumulate child stats.
        for (size_t i = 0; i < n; ++i) {
            const int id = node_of[i];
            if (!in_frontier[static_cast<size_t>(id)]) continue;
            const TreeNode& node = tree.nodes[static_cast<size_t>(id)];
            if (node.feature < 0) continue;
            const int child =
                x[i][static_cast<size_t>(node.feature)] < node.threshold ? node.left : node.right;
            node_of[i] = child;
            NodeStats& cs = stats[static_cast<size_t>(child)];
            cs.g += grad[i];
            cs.h += hess[i];
            ++cs.count;
        }
        frontier = std::move(next_frontier);
    }

    // Depth limit reached: remaining frontier nodes are leaves.
    for (int id : frontier) {
        TreeNode& node = tree.nodes[static_cast<size_t>(id)];
        const NodeStats& total = stats[static_cast<size_t>(id)];
        node.feature = -1;
        node.value = params.learning_rate * leaf_score(total.g, total.h, params.reg_lambda);
    }
    return tree;
}

void softmax_inplace(std::vector<double>& s) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : s) m = std::max(m, v);
    double sum = 0.0;
    for (double& v : s) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : s) v /= sum;
}

}  // namespace

GbtModel gbt_train(const std::vector<std::vector<double>>& x, const std::vector<size_t>& y,
                   size_t n_classes, const GbtParams& params, uint64_t /*seed*/,
                   GbtReport* report) {
    if (x.size() != y.size() || x.empty()) throw_input("gbt_train: bad training shape");
    if (n_classes < 2) throw_input("gbt_train: need at least 2 classes");
    if (params.max_depth < 0 && params.n_rounds == 0)
        throw_input("gbt_train: degenerate parameters");

    const size_t n = x.size();
    const size_t n_features = x[0].size();

    GbtModel model;
    model.n_classes = n_classes;
    model.n_features = n_features;
    model.params = params;

    // Base scores are the log class priors, so a root-only first tree adds 0.
    std::vector<size_t> class_counts(n_classes, 0);
    for (size_t label : y) {
        if (label >= n_classes) throw_input("gbt_train: label out of range");
        ++class_counts[label];
    }
    model.base_scores.resize(n_classes);
    for (size_t k = 0; k < n_classes; ++k) {
        if (class_counts[k] == 0) throw_input("gbt_train: class without samples");
        model.base_scores[k] =
            std::log(static_cast<double>(class_counts[k]) / static_cast<double>(n));
    }

    // Per-feature argsort, computed once (no row subsampling).
    std::vector<std::vector<int>> sorted_by_feature(n_features);
    for (size_t f = 0; f < n_features; ++f) {
        auto& order = sorted_by_feature[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return x[static_cast<size_t>(a)][f] < x[static_cast<size_t>(b)][f]; });
    }

    std::vector<std::vector<double>> scores(n, std::vector<double>(n_classes));
    for (auto& row : scores) row = model.base_scores;

    auto log_loss = [&] {
        double total = 0.0;
        std::vector<double> p(n_classes);
        for (size_t i = 0; i < n; ++i) {
            p = scores[i];
            softmax_inplace(p);
            total -= std::log(std::max(p[y[i]], 1e-300));
        }
        return total / static_cast<double>(n);
    };
    if (report) report->loss_per_round.push_back(log_loss());

    std::vector<double> grad(n), hess(n), probs(n_classes);
    for (size_t round = 0; round < params.n_rounds; ++round) {
        std::vector<std::vector<double>> p_all(n, std::vector<double>(n_classes));
        for (size_t i = 0; i < n; ++i) {
            p_all[i] = scores[i];
            softmax_inplace(p_all[i]);
        }

        std::vector<RegressionTree> round_trees;
        round_trees.reserve(n_classes);
        for (size_t k = 0; k < n_classes; ++k) {
            for (size_t i = 0; i < n; ++i) {
                const double p = p_all[i][k];
                grad[i] = p - (y[i] == k ? 1.0 : 0.0);
                hess[i] = std::max(p * (1.0 - p), 1e-16);
            }
            RegressionTree tree = build_tree(x, grad, hess, sorted_by_feature, params);
            for (size_t i = 0; i < n; ++i) scores[i][k] += tree.eval(x[i]);
            round_trees.push_back(std::move(tree));
        }
        model.rounds.push_back(std::move(round_trees));
        if (report) report->loss_per_round.push_back(log_loss());
    }
    return model;
}

Prediction gbt_predict(const GbtModel& model, const std::vector<double>& x) {
    if (x.size() != model.n_features) throw_input("gbt_predict: feature length mismatch");

    Prediction pred;
    pred.probabilities.assign(model.n_classes, 0.0);
    for (size_t k = 0; k < model.n_classes; ++k)
        pred.probabilities[k] = model.base_scores.empty() ? 0.0 : model.base_scores[k];
    for (const auto& round : model.rounds)
        for (size_t k = 0; k < model.n_classes; ++k)
            pred.probabilities[k] += round[k].eval(x);
    softmax_inplace(pred.probabilities);
    pred.class_index = 0;
    for (size_t k = 1; k < model.n_classes; ++k)
        if (pred.probabilities[k] > pred.probabilities[pred.class_index]) pred.class_index = k;
    return pred;
}

}  // namespace railenv
