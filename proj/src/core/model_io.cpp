#include "core/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace railenv {

using nlohmann::json;

namespace {

constexpr const char* model_format = "railenv-model-v1";
constexpr const char* error_models_format = "railenv-error-models-v1";

json dump_tree(const RegressionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        if (n.feature < 0) {
            nodes.push_back({{"v", n.value}});
        } else {
            nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
        }
    }
    return nodes;
}

RegressionTree parse_tree(const json& jnodes) {
    RegressionTree tree;
    for (const auto& jn : jnodes) {
        TreeNode n;
        if (jn.contains("f")) {
            n.feature = jn.at("f").get<int>();
            n.threshold = jn.at("t").get<double>();
            n.left = jn.at("l").get<int>();
            n.right = jn.at("r").get<int>();
        } else {
            n.value = jn.at("v").get<double>();
        }
        tree.nodes.push_back(n);
    }
    return tree;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw_input("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path, const char* expected_format) {
    std::ifstream in(path);
    if (!in) throw_input("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw_input(path + ": " + e.what());
    }
    if (j.value("format", "") != expected_format)
        throw_input(path + ": unexpected document format");
    return j;
}

}  // namespace

Prediction TrainedClassifier::predict(const FeatureVector& fv) const {
    const std::vector<double> x = standardizer.transform(fv);
    if (mlr) return mlr_predict(*mlr, x);
    if (gbt) return gbt_predict(*gbt, x);
    throw_input("classifier has no model payload");
}

EnvironmentClass TrainedClassifier::predict_class(const FeatureVector& fv) const {
    return classes.at(predict(fv).class_index);
}

void save_model(const std::string& path, const TrainedClassifier& model,
                const std::string& config_hash, const MlrReport* cv_report) {
    json j;
    j["format"] = model_format;
    j["config_hash"] = config_hash;
    j["schema_hash"] = model.schema_hash;
    j["feature_names"] = model.feature_names;
    json classes = json::array();
    for (EnvironmentClass c : model.classes) classes.push_back(class_name(c));
    j["classes"] = classes;
    j["standardizer"] = {{"means", model.standardizer.means()},
                         {"stds", model.standardizer.stds()},
                         {"constant", model.standardizer.constant_flags()}};
    if (model.mlr) {
        j["kind"] = "mlr";
        json jm;
        jm["lambda"] = model.mlr->lambda;
        jm["n_classes"] = model.mlr->n_classes;
        jm["n_features"] = model.mlr->n_features;
        jm["weights"] = model.mlr->weights;
        jm["bias"] = model.mlr->bias;
        if (cv_report) {
            json cv = json::array();
            for (const auto& cell : cv_report->cv)
                cv.push_back({{"lambda", cell.lambda}, {"accuracy", cell.mean_accuracy}});
            jm["cv"] = cv;
        }
        j["mlr"] = jm;
    } else if (model.gbt) {
        j["kind"] = "gbt";
        json jg;
        jg["n_classes"] = model.gbt->n_classes;
        jg["n_features"] = model.gbt->n_features;
        jg["base_scores"] = model.gbt->base_scores;
        jg["params"] = {{"n_rounds", model.gbt->params.n_rounds},
                        {"max_depth", model.gbt->params.max_depth},
                        {"learning_rate", model.gbt->params.learning_rate},
                        {"min_leaf", model.gbt->params.min_leaf},
                        {"reg_lambda", model.gbt->params.reg_lambda}};
        json rounds = json::array();
        for (const auto& round : model.gbt->rounds) {
            json jround = json::array();
            for (const auto& tree : round) jround.push_back(dump_tree(tree));
            rounds.push_back(jround);
        }
        jg["rounds"] = rounds;
        j["gbt"] = jg;
    } else {
        throw_input("cannot save classifier without a model payload");
    }
    write_json_file(path, j);
}

TrainedClassifier load_model(const std::string& path) {
    const json j = read_json_file(path, model_format);
    TrainedClassifier model;
    model.schema_hash = j.at("schema_hash").get<std::string>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& name : j.at("classes")) {
        const auto c = parse_class(name.get<std::string>());
        if (!c) throw_input(path + ": unknown class '" + name.get<std::string>() + "'");
        model.classes.push_back(*c);
    }
    model.standardizer = Standardizer::from_parts(
        j.at("standardizer").at("means").get<std::vector<double>>(),
        j.at("standardizer").at("stds").get<std::vector<double>>(),
        j.at("standardizer").at("constant").get<std::vector<bool>>());

    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mlr") {
        MlrModel m;
        const json& jm = j.at("mlr");
        m.lambda = jm.at("lambda").get<double>();
        m.n_classes = jm.at("n_classes").get<size_t>();
        m.n_features = jm.at("n_features").get<size_t>();
        m.weights = jm.at("weights").get<std::vector<double>>();
        m.bias = jm.at("bias").get<std::vector<double>>();
        if (m.weights.size() != m.n_classes * m.n_features || m.bias.size() != m.n_classes)
            throw_input(path + ": inconsistent MLR shape");
        model.mlr = std::move(m);
    } else if (kind == "gbt") {
        GbtModel m;
        const json& jg = j.at("gbt");
        m.n_classes = jg.at("n_classes").get<size_t>();
        m.n_features = jg.at("n_features").get<size_t>();
        m.base_scores = jg.at("base_scores").get<std::vector<double>>();
        const json& jp = jg.at("params");
        m.params.n_rounds = jp.at("n_rounds").get<size_t>();
        m.params.max_depth = jp.at("max_depth").get<int>();
        m.params.learning_rate = jp.at("learning_rate").get<double>();
        m.params.min_leaf = jp.at("min_leaf").get<size_t>();
        m.params.reg_lambda = jp.at("reg_lambda").get<double>();
        for (const auto& jround : jg.at("rounds")) {
            std::vector<RegressionTree> round;
            for (const auto& jtree : jround) round.push_back(parse_tree(jtree));
            if (round.size() != m.n_classes) throw_input(path + ": inconsistent GBT round");
            m.rounds.push_back(std::move(round));
        }
        model.gbt = std::move(m);
    } else {
        throw_input(path + ": unknown model kind '" + kind + "'");
    }
    if (model.feature_names.size() != model.standardizer.feature_count())
        throw_input(path + ": standardizer does not match feature list");
    return model;
}

namespace {

json dump_error_model(const GaussianErrorModel& m) {
    return {{"class", m.key.label ? class_name(*m.key.label) : "any"},
            {"constellation", constellation_name(m.key.constellation)},
            {"band", m.key.band_code},
            {"mean_m", m.mean_m},
            {"var_m2", m.variance_m2},
            {"classical_var_m2", m.classical_variance_m2},
            {"n", m.sample_count},
            {"h_fraction", m.h_fraction}};
}

GaussianErrorModel parse_error_model(const json& jm, const std::string& path) {
    GaussianErrorModel m;
    const std::string cls = jm.at("class").get<std::string>();
    if (cls != "any") {
        const auto label = parse_class(cls);
        if (!label) throw_input(path + ": unknown class '" + cls + "'");
        m.key.label = *label;
    }
    const auto constellation = constellation_from_name(jm.at("constellation").get<std::string>());
    if (!constellation) throw_input(path + ": unknown constellation");
    m.key.constellation = *constellation;
    m.key.band_code = jm.at("band").get<std::string>();
    m.mean_m = jm.at("mean_m").get<double>();
    m.variance_m2 = jm.at("var_m2").get<double>();
    m.classical_variance_m2 = jm.at("classical_var_m2").get<double>();
    m.sample_count = jm.at("n").get<size_t>();
    m.h_fraction = jm.at("h_fraction").get<double>();
    return m;
}

}  // namespace

void save_error_models(const std::string& path, const ErrorModelSet& set,
                       const std::string& config_hash) {
    json j;
    j["format"] = error_models_format;
    j["config_hash"] = config_hash;
    json models = json::array();
    for (const auto& [key, model] : set.models) models.push_back(dump_error_model(model));
    j["models"] = models;
    if (set.fallback) j["fallback"] = dump_error_model(*set.fallback);
    write_json_file(path, j);
}

ErrorModelSet load_error_models(const std::string& path) {
    const json j = read_json_file(path, error_models_format);
    ErrorModelSet set;
    for (const auto& jm : j.at("models")) {
        GaussianErrorModel m = parse_error_model(jm, path);
        set.models[m.key] = m;
    }
    if (j.contains("fallback")) set.fallback = parse_error_model(j.at("fallback"), path);
    return set;
}

}  // namespace railenv
