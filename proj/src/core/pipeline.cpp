#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "core/csv_formats.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/model_io.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "core/table_io.hpp"

namespace railenv {

namespace fs = std::filesystem;

namespace {

void require_path(const std::string& path, const char* what) {
    if (path.empty()) throw_input(std::string("config is missing the ") + what + " path");
    if (!fs::exists(path)) throw_input(std::string(what) + " file not found: " + path);
}

std::string out_file(const PipelineConfig& c, const char* name) {
    fs::create_directories(c.paths.out_dir);
    return (fs::path(c.paths.out_dir) / name).string();
}

struct LoadedJourney {
    ObsFile obs;
    NavFile nav;
    GroundTruthTrack truth;
    std::optional<LabelTimeline> labels;
    AlignedJourney aligned;
};

LoadedJourney load_journey(const PipelineConfig& c) {
    require_path(c.paths.obs, "observation");
    require_path(c.paths.nav, "navigation");
    require_path(c.paths.truth, "ground-truth");

    LoadedJourney j;
    j.obs = parse_obs(c.paths.obs, c.signals);
    j.nav = parse_nav(c.paths.nav);
    j.truth = parse_ground_truth(c.paths.truth);
    if (!c.paths.labels.empty()) {
        require_path(c.paths.labels, "label");
        j.labels = parse_labels(c.paths.labels);
    }
    j.aligned = align(j.obs.epochs, j.truth, j.labels ? &*j.labels : nullptr);
    if (j.aligned.epochs.empty())
        throw_input("no overlap between the observation epochs and the ground-truth span");
    return j;
}

}  // namespace

std::string run_extract(const PipelineConfig& c) {
    LoadedJourney j = load_journey(c);

    if (c.residuals.iono_policy == IonoPolicy::require && !j.nav.iono)
        throw_input("navigation file has no Klobuchar coefficients (iono_policy=require)");

    const ResidualDataset dataset =
        residual_dataset(j.aligned, j.nav.ephemerides, j.nav.iono, c.residuals);
    if (dataset.records.empty()) throw_input("no residuals could be formed");

    write_residuals_csv(resolved_residuals_path(c), dataset.records,
                        {{"config", c.hash()},
                         {"epochs_processed", std::to_string(dataset.epochs_processed)},
                         {"epochs_skipped", std::to_string(dataset.epochs_skipped)},
                         {"epochs_dropped_outside_track",
                          std::to_string(j.aligned.dropped_outside_track)}});

    return "extract: " + std::to_string(dataset.records.size()) + " residuals from " +
           std::to_string(dataset.epochs_processed) + " epochs (" +
           std::to_string(dataset.epochs_skipped) + " skipped, " +
           std::to_string(j.aligned.dropped_outside_track) + " outside truth span)";
}

namespace {

FeatureTable featurize_journey(const PipelineConfig& c, const LoadedJourney& j) {
    const FeatureSchema schema = FeatureSchema::build(c.signals.ordered());
    FeatureTable table;
    table.names = schema.names();

    // Geometry per epoch for every satellite with a usable ephemeris.
    std::vector<EpochGeometry> geometry(j.aligned.epochs.size());
    for (size_t i = 0; i < j.aligned.epochs.size(); ++i) {
        const auto& a = j.aligned.epochs[i];
        std::set<SatelliteId> sats;
        for (const auto& obs : a.epoch.observations) sats.insert(obs.sat);
        for (const auto& sat : sats) {
            if (!j.nav.ephemerides.has_valid(sat, a.epoch.time)) continue;
            const auto& eph = j.nav.ephemerides.select(sat, a.epoch.time);
            geometry[i].look[sat] = geometric_range(a.truth_position, a.epoch.time, eph).azel;
        }
    }

    const size_t half = c.feature_window / 2;
    for (size_t i = 0; i < j.aligned.epochs.size(); ++i) {
        ObservationEpoch pooled = j.aligned.epochs[i].epoch;
        EpochGeometry look = geometry[i];
        if (c.feature_window > 1) {
            const size_t lo = i >= half ? i - half : 0;
            const size_t hi = std::min(j.aligned.epochs.size() - 1, i + half);
            for (size_t k = lo; k <= hi; ++k) {
                if (k == i) continue;
                const auto& other = j.aligned.epochs[k].epoch;
                pooled.observations.insert(pooled.observations.end(), other.observations.begin(),
                                           other.observations.end());
                for (const auto& [sat, azel] : geometry[k].look) look.look.emplace(sat, azel);
            }
        }
        table.vectors.push_back(
            featurize_epoch(pooled, look, schema, c.residuals.elevation_cutoff_rad));
        table.vectors.back().time = j.aligned.epochs[i].epoch.time;
        table.labels.push_back(j.aligned.epochs[i].label);
    }
    return table;
}

}  // namespace

std::string run_featurize(const PipelineConfig& c) {
    LoadedJourney j = load_journey(c);
    const FeatureTable table = featurize_journey(c, j);
    write_features_csv(resolved_features_path(c), table, {{"config", c.hash()}});
    return "featurize: " + std::to_string(table.vectors.size()) + " feature vectors, " +
           std::to_string(table.names.size()) + " features";
}

namespace {

struct PreparedDataset {
    Dataset dataset;
    Split split;
    std::vector<std::string> feature_names;
    std::string schema_hash;
};

PreparedDataset prepare_dataset(const PipelineConfig& c) {
    const std::string features_path = resolved_features_path(c);
    require_path(features_path, "feature");
    FeatureTable table = read_features_csv(features_path);

    const FeatureSchema expected = FeatureSchema::build(c.signals.ordered());
    if (table.names != expected.names())
        throw_input(features_path + ": feature schema does not match the configuration");

    PreparedDataset p;
    p.feature_names = table.names;
    p.schema_hash = schema_hash_from_names(table.names);
    p.dataset = build_dataset(table.vectors, table.labels, c.classifier.dataset_policy);
    if (c.classifier.train_size >= p.dataset.samples.size())
        throw_input("train_size " + std::to_string(c.classifier.train_size) +
                    " needs more than " + std::to_string(p.dataset.samples.size()) + " samples");
    p.split = split_dataset(p.dataset.samples, c.classifier.train_size, c.master_seed);
    return p;
}

std::vector<EnvironmentClass> classes_of(const std::vector<LabeledSample>& samples) {
    std::set<EnvironmentClass> seen;
    for (const auto& s : samples) seen.insert(s.label);
    return {seen.begin(), seen.end()};
}

struct DesignMatrix {
    std::vector<std::vector<double>> x;
    std::vector<size_t> y;
};

DesignMatrix design_matrix(const std::vector<LabeledSample>& samples,
                           const Standardizer& standardizer,
                           const std::vector<EnvironmentClass>& classes) {
    DesignMatrix d;
    d.x.reserve(samples.size());
    d.y.reserve(samples.size());
    for (const auto& s : samples) {
        d.x.push_back(standardizer.transform(s.features));
        const auto it = std::find(classes.begin(), classes.end(), s.label);
        if (it == classes.end()) throw_input("sample label outside the training class list");
        d.y.push_back(static_cast<size_t>(it - classes.begin()));
    }
    return d;
}

}  // namespace

std::string run_train(const PipelineConfig& c) {
    PreparedDataset p = prepare_dataset(c);

    TrainedClassifier model;
    model.feature_names = p.feature_names;
    model.schema_hash = p.schema_hash;
    model.classes = classes_of(p.split.train);
    if (model.classes.size() < 2)
        throw_input("training split holds a single class; cannot train a classifier");
    model.standardizer = Standardizer::fit(p.split.train, p.feature_names.size());

    const DesignMatrix train = design_matrix(p.split.train, model.standardizer, model.classes);

    std::string detail;
    MlrReport mlr_report;
    if (c.classifier.kind == ClassifierKind::mlr) {
        model.mlr = mlr_train(train.x, train.y, model.classes.size(), c.classifier.mlr,
                              c.master_seed, &mlr_report);
        detail = "mlr lambda=" + tableio::fmt(mlr_report.chosen_lambda);
        save_model(resolved_model_path(c), model, c.hash(), &mlr_report);
    } else {
        GbtReport gbt_report;
        model.gbt = gbt_train(train.x, train.y, model.classes.size(), c.classifier.gbt,
                              c.master_seed, &gbt_report);
        detail = "gbt rounds=" + std::to_string(c.classifier.gbt.n_rounds);
        save_model(resolved_model_path(c), model, c.hash());
    }

    return "train: " + std::to_string(p.split.train.size()) + " train / " +
           std::to_string(p.split.test.size()) + " test samples, " +
           std::to_string(model.classes.size()) + " classes (" + detail + ")";
}

std::string run_evaluate(const PipelineConfig& c) {
    PreparedDataset p = prepare_dataset(c);
    const std::string model_path = resolved_model_path(c);
    require_path(model_path, "model");
    const TrainedClassifier model = load_model(model_path);
    if (model.schema_hash != p.schema_hash)
        throw_input("model schema hash does not match the feature table");

    std::vector<EnvironmentClass> truth, predicted;
    truth.reserve(p.split.test.size());
    for (const auto& sample : p.split.test) {
        truth.push_back(sample.label);
        predicted.push_back(model.predict_class(sample.features));
    }
    const ConfusionMatrix cm = confusion(truth, predicted, model.classes);

    {
        tableio::CsvWriter w(out_file(c, "confusion.csv"));
        w.comment("config", c.hash());
        std::string header = "true_class";
        for (EnvironmentClass cls : cm.classes) header += "," + class_name(cls);
        w.header(header);
        for (size_t i = 0; i < cm.classes.size(); ++i) {
            std::vector<std::string> fields{class_name(cm.classes[i])};
            for (size_t k = 0; k < cm.classes.size(); ++k)
                fields.push_back(std::to_string(cm.at(i, k)));
            w.row(fields);
        }
    }
    {
        tableio::CsvWriter w(out_file(c, "metrics.csv"));
        w.comment("config", c.hash());
        w.header("name,class,value");
        w.row({"accuracy", "", tableio::fmt(cm.accuracy())});
        for (size_t i = 0; i < cm.classes.size(); ++i) {
            w.row({"recall", class_name(cm.classes[i]), tableio::fmt(cm.recall(i))});
            w.row({"precision", class_name(cm.classes[i]), tableio::fmt(cm.precision(i))});
        }
    }
    {
        const ImportanceReport importance = permutation_importance(
            [&model](const FeatureVector& fv) { return model.predict_class(fv); }, p.split.test,
            model.feature_names, c.classifier.importance_repeats, c.master_seed);
        tableio::CsvWriter w(out_file(c, "importance.csv"));
        w.comment("config", c.hash());
        w.comment("baseline_accuracy", tableio::fmt(importance.baseline_accuracy));
        w.header("feature,mean_accuracy_drop");
        for (const auto& entry : importance.entries)
            w.row({entry.feature, tableio::fmt(entry.mean_accuracy_drop)});
    }

    char acc[32];
    std::snprintf(acc, sizeof(acc), "%.4f", cm.accuracy());
    return "evaluate: accuracy " + std::string(acc) + " on " +
           std::to_string(p.split.test.size()) + " test samples";
}

std::string run_fit_errors(const PipelineConfig& c) {
    const std::string residuals_path = resolved_residuals_path(c);
    require_path(residuals_path, "residual");
    const std::vector<ResidualRecord> records = read_residuals_csv(residuals_path);

    FitReport report;
    const ErrorModelSet set = fit_error_models(records, c.error_fit, c.master_seed, &report);
    save_error_models(resolved_error_models_path(c), set, c.hash());

    // Histogram bins per fitted group, for distribution plots.
    {
        constexpr double lo = -25.0, hi = 25.0;
        constexpr size_t bins = 100;
        constexpr double width = (hi - lo) / static_cast<double>(bins);
        tableio::CsvWriter w(out_file(c, "residual_hist.csv"));
        w.comment("config", c.hash());
        for (const auto& [key, n] : report.skipped_small_groups)
            w.comment("skipped_group", to_string(key) + " n=" + std::to_string(n));
        w.header("class,constellation,band,bin_lo_m,bin_hi_m,count");
        for (const auto& [key, model] : set.models) {
            std::vector<size_t> counts(bins, 0);
            for (const auto& rec : records) {
                if (ModelKey{c.error_fit.group_by_class ? rec.label : std::nullopt,
                             rec.sat.constellation, rec.band_code} != key)
                    continue;
                const double v = rec.epsilon_m;
                if (v < lo || v >= hi) continue;
                ++counts[static_cast<size_t>((v - lo) / width)];
            }
            for (size_t b = 0; b < bins; ++b) {
                if (counts[b] == 0) continue;
                w.row({key.label ? class_name(*key.label) : "any",
                       constellation_name(key.constellation), key.band_code,
                       tableio::fmt(lo + width * static_cast<double>(b)),
                       tableio::fmt(lo + width * static_cast<double>(b + 1)),
                       std::to_string(counts[b])});
            }
        }
    }

    return "fit-errors: " + std::to_string(set.models.size()) + " group models (+fallback), " +
           std::to_string(report.skipped_small_groups.size()) + " groups below minimum size";
}

std::string run_simulate(const PipelineConfig& c) {
    const std::string models_path = resolved_error_models_path(c);
    require_path(models_path, "error-model");
    require_path(c.paths.obs, "observation");
    const ErrorModelSet models = load_error_models(models_path);
    const ObsFile obs = parse_obs(c.paths.obs, c.signals);

    std::optional<LabelTimeline> labels;
    if (!c.paths.labels.empty()) {
        require_path(c.paths.labels, "label");
        labels = parse_labels(c.paths.labels);
    }

    std::vector<ScheduleEpoch> schedule;
    schedule.reserve(obs.epochs.size());
    for (const auto& epoch : obs.epochs) {
        ScheduleEpoch se;
        se.time = epoch.time;
        const std::optional<EnvironmentClass> label =
            labels ? labels->at(epoch.time) : std::nullopt;
        se.no_signal =
            c.simulate.tunnel_no_signal && label && *label == EnvironmentClass::tunnel;
        for (const auto& o : epoch.observations) se.entries.push_back({o.sat, o.band_code, label});
        schedule.push_back(std::move(se));
    }

    const std::vector<SampledError> stream = sample_errors(models, schedule, c.master_seed);
    write_stream_csv(resolved_stream_path(c), stream, {{"config", c.hash()}});

    size_t markers = 0;
    for (const auto& s : stream)
        if (!s.error_m) ++markers;
    return "simulate: " + std::to_string(stream.size()) + " samples (" + std::to_string(markers) +
           " no-signal markers)";
}

std::string run_synth(const PipelineConfig& c) {
    const SyntheticScenario scenario =
        generate_scenario(c.synth, c.signals, c.residuals, c.master_seed, c.error_fit.h_fraction);

    const std::vector<std::pair<std::string, std::string>> comments = {{"config", c.hash()}};
    write_obs_csv(out_file(c, "obs.csv"), scenario.epochs, comments);
    write_nav_csv(out_file(c, "nav.csv"), scenario.ephemerides, scenario.iono, comments);
    write_ground_truth_csv(out_file(c, "truth.csv"), scenario.truth, comments);
    write_labels_csv(out_file(c, "labels.csv"), scenario.labels, comments);
    save_error_models(out_file(c, "truth_models.json"), scenario.truth_models, c.hash());

    return "synth: " + std::to_string(scenario.epochs.size()) + " epochs, " +
           std::to_string(scenario.ephemerides.size()) + " ephemerides, " +
           std::to_string(scenario.labels.intervals.size()) + " label intervals";
}

}  // namespace railenv
