#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "core/config.hpp"
#include "core/csv_formats.hpp"
#include "core/errors.hpp"
#include "core/model_io.hpp"
#include "core/pipeline.hpp"
#include "test_data.hpp"

using namespace railenv;

namespace {

PipelineConfig small_config(const testdata::TempDir& dir, double error_var = 1.0) {
    PipelineConfig c;
    c.signals.codes = {{Constellation::gps, {"C1C"}}};
    c.master_seed = 424242;
    c.paths.out_dir = dir.file("out");
    c.paths.obs = dir.file("out/obs.csv");
    c.paths.nav = dir.file("out/nav.csv");
    c.paths.truth = dir.file("out/truth.csv");
    c.paths.labels = dir.file("out/labels.csv");
    c.synth.duration_s = 240.0;
    c.synth.n_gps = 24;
    c.synth.classes = {
        {EnvironmentClass::station, 60.0, 45.0, 0.8, 0.0, error_var, true},
        {EnvironmentClass::open_sky_rural, 60.0, 49.0, 0.8, 0.0, error_var, false},
        {EnvironmentClass::trees, 60.0, 40.0, 0.8, 0.0, error_var, false},
        {EnvironmentClass::buildings, 60.0, 35.0, 0.8, 0.0, error_var, false},
    };
    c.classifier.train_size = 150;
    c.classifier.gbt.n_rounds = 25;
    c.error_fit.min_group_size = 30;
    return c;
}

}  // namespace

TEST_CASE("synth stage writes the journey files and is byte-deterministic") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    const std::string summary = run_synth(c);
    CHECK(summary.find("synth:") == 0);

    for (const char* name : {"obs.csv", "nav.csv", "truth.csv", "labels.csv", "truth_models.json"})
        CHECK(std::filesystem::exists(dir.file(std::string("out/") + name)));

    const std::string obs_a = testdata::read_file(dir.file("out/obs.csv"));
    PipelineConfig again = c;
    again.paths.out_dir = dir.file("out2");
    run_synth(again);
    CHECK(obs_a == testdata::read_file(dir.file("out2/obs.csv")));
    CHECK(testdata::read_file(dir.file("out/truth.csv")) ==
          testdata::read_file(dir.file("out2/truth.csv")));
    CHECK(testdata::read_file(dir.file("out/truth_models.json")) ==
          testdata::read_file(dir.file("out2/truth_models.json")));
}

TEST_CASE("extract on a zero-error journey leaves epsilon below 1e-6 m") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir, 0.0);
    run_synth(c);
    const std::string summary = run_extract(c);
    CHECK(summary.find("extract:") == 0);

    const auto records = read_residuals_csv(dir.file("out/residuals.csv"));
    CHECK(records.size() > 1000);
    for (const auto& r : records) CHECK(std::fabs(r.epsilon_m) < 1e-6);

    // Labels flow into the residual table.
    size_t labeled = 0;
    for (const auto& r : records)
        if (r.label) ++labeled;
    CHECK(labeled == records.size());
}

TEST_CASE("extract is byte-deterministic across reruns") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir, 2.0);
    run_synth(c);
    run_extract(c);
    const std::string first = testdata::read_file(dir.file("out/residuals.csv"));
    run_extract(c);
    CHECK(first == testdata::read_file(dir.file("out/residuals.csv")));
}

TEST_CASE("missing navigation input fails with an input error") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    run_synth(c);
    std::filesystem::remove(dir.file("out/nav.csv"));
    try {
        run_extract(c);
        FAIL("expected an input error");
    } catch (const Error& e) {
        CHECK(e.status() == Status::input);
        CHECK(std::string(e.what()).find("navigation") != std::string::npos);
    }
}

TEST_CASE("disjoint observation and truth spans give a 'no overlap' error") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    run_synth(c);

    // Rewrite the truth a day away from the observations.
    GroundTruthTrack track;
    track.samples = {{{2200, 0.0}, {6378137.0, 0.0, 0.0}},
                     {{2200, 10.0}, {6378137.0, 0.0, 100.0}}};
    write_ground_truth_csv(dir.file("out/truth.csv"), track);

    CHECK_THROWS_WITH_AS(run_extract(c), doctest::Contains("no overlap"), Error);
}

TEST_CASE("featurize writes one row per aligned epoch and is rerun-identical") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    run_synth(c);
    const std::string summary = run_featurize(c);
    CHECK(summary.find("featurize:") == 0);

    const FeatureTable table = read_features_csv(dir.file("out/features.csv"));
    CHECK(table.vectors.size() == 240);  // one per epoch, tunnel-free scenario
    CHECK(table.names == FeatureSchema::build(c.signals.ordered()).names());

    size_t labeled = 0;
    for (const auto& label : table.labels)
        if (label) ++labeled;
    CHECK(labeled == table.vectors.size());

    const std::string first = testdata::read_file(dir.file("out/features.csv"));
    run_featurize(c);
    CHECK(first == testdata::read_file(dir.file("out/features.csv")));
}

TEST_CASE("windowed featurization pools neighbouring epochs deterministically") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    run_synth(c);

    PipelineConfig windowed = c;
    windowed.feature_window = 3;
    windowed.paths.out_dir = dir.file("win");
    run_featurize(windowed);
    const FeatureTable wide = read_features_csv(dir.file("win/features.csv"));
    CHECK(wide.vectors.size() == 240);

    run_featurize(c);
    const FeatureTable plain = read_features_csv(dir.file("out/features.csv"));
    const auto var_idx = static_cast<size_t>(
        std::find(plain.names.begin(), plain.names.end(), "G_C1C_cn0_var") -
        plain.names.begin());
    // Pooling three epochs widens the per-epoch C/N0 sample.
    double plain_sum = 0.0, wide_sum = 0.0;
    for (size_t i = 0; i < plain.vectors.size(); ++i) {
        if (plain.vectors[i].mask[var_idx]) plain_sum += 1.0;
        if (wide.vectors[i].mask[var_idx]) wide_sum += 1.0;
    }
    CHECK(plain_sum > 0);
    CHECK(wide_sum > 0);

    const std::string first = testdata::read_file(dir.file("win/features.csv"));
    run_featurize(windowed);
    CHECK(first == testdata::read_file(dir.file("win/features.csv")));
}

TEST_CASE("constant C/N0 journeys produce zero-variance features") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    c.synth.cn0_elevation_gain_db = 0.0;
    for (auto& cls : c.synth.classes) cls.cn0_sigma_dbhz = 0.0;
    run_synth(c);
    run_featurize(c);

    const FeatureTable table = read_features_csv(dir.file("out/features.csv"));
    const auto var_it =
        std::find(table.names.begin(), table.names.end(), "G_C1C_cn0_var");
    REQUIRE(var_it != table.names.end());
    const size_t var_idx = static_cast<size_t>(var_it - table.names.begin());
    for (const auto& fv : table.vectors) {
        REQUIRE(fv.mask[var_idx]);
        CHECK(fv.values[var_idx] == 0.0);
    }
}

TEST_CASE("train and evaluate separate the synthetic environments") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    run_synth(c);
    run_featurize(c);

    const std::string train_summary = run_train(c);
    CHECK(train_summary.find("train:") == 0);
    CHECK(std::filesystem::exists(dir.file("out/model.json")));

    const TrainedClassifier model = load_model(dir.file("out/model.json"));
    CHECK(model.classes.size() == 4);
    CHECK(model.gbt.has_value());

    const std::string eval_summary = run_evaluate(c);
    CHECK(eval_summary.find("evaluate:") == 0);
    for (const char* name : {"confusion.csv", "metrics.csv", "importance.csv"})
        CHECK(std::filesystem::exists(dir.file(std::string("out/") + name)));

    // Distinct C/N0 signatures: expect high accuracy on this easy scenario.
    const double accuracy = std::stod(eval_summary.substr(std::string("evaluate: accuracy ").size()));
    CHECK(accuracy >= 0.9);
}

TEST_CASE("MLR path trains, persists and evaluates") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    c.classifier.kind = ClassifierKind::mlr;
    c.classifier.mlr.lambda_grid = {1e-3, 1e-1};
    c.classifier.mlr.max_iterations = 150;
    run_synth(c);
    run_featurize(c);
    run_train(c);
    const TrainedClassifier model = load_model(dir.file("out/model.json"));
    CHECK(model.mlr.has_value());
    const std::string eval_summary = run_evaluate(c);
    const double accuracy = std::stod(eval_summary.substr(std::string("evaluate: accuracy ").size()));
    CHECK(accuracy >= 0.8);
}

TEST_CASE("fit-errors recovers models per class and honors h_fraction = 1") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir, 3.0);
    run_synth(c);
    run_extract(c);
    const std::string summary = run_fit_errors(c);
    CHECK(summary.find("fit-errors:") == 0);

    const ErrorModelSet set = load_error_models(dir.file("out/error_models.json"));
    CHECK(set.models.size() == 4);
    REQUIRE(set.fallback.has_value());
    CHECK(std::filesystem::exists(dir.file("out/residual_hist.csv")));

    // h_fraction 1 reduces the robust fit to the classical estimator.
    PipelineConfig classical = c;
    classical.error_fit.h_fraction = 1.0;
    classical.paths.out_dir = dir.file("classical");
    classical.paths.residuals = dir.file("out/residuals.csv");
    run_fit_errors(classical);
    const ErrorModelSet classical_set =
        load_error_models(dir.file("classical/error_models.json"));
    for (const auto& [key, model] : classical_set.models) {
        CHECK(model.variance_m2 == doctest::Approx(model.classical_variance_m2).epsilon(1e-9));
    }
}

TEST_CASE("simulate draws a deterministic stream with tunnel markers") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir, 2.0);
    run_synth(c);
    run_extract(c);
    run_fit_errors(c);

    // Journey schedule with a Tunnel stretch: craft obs + labels directly.
    std::vector<ObservationEpoch> epochs(20);
    for (size_t e = 0; e < epochs.size(); ++e) {
        epochs[e].time = {2200, 172800.0 + static_cast<double>(e)};
        for (int s = 0; s < 3; ++s)
            epochs[e].observations.push_back(
                {{Constellation::gps, s + 1}, "C1C", 2.1e7 + 1000.0 * s, 40.0});
    }
    write_obs_csv(dir.file("sched_obs.csv"), epochs);
    LabelTimeline timeline;
    timeline.intervals = {
        {{2200, 172800.0}, {2200, 172810.0}, EnvironmentClass::trees},
        {{2200, 172810.0}, {2200, 172820.0}, EnvironmentClass::tunnel},
    };
    write_labels_csv(dir.file("sched_labels.csv"), timeline);

    PipelineConfig sim = c;
    sim.paths.obs = dir.file("sched_obs.csv");
    sim.paths.labels = dir.file("sched_labels.csv");
    const std::string summary = run_simulate(sim);
    CHECK(summary.find("simulate:") == 0);
    CHECK(summary.find("30 no-signal markers") != std::string::npos);

    const std::string stream = testdata::read_file(dir.file("out/injected_errors.csv"));
    run_simulate(sim);
    CHECK(stream == testdata::read_file(dir.file("out/injected_errors.csv")));

    // Tunnel rows carry no value; Trees rows do.
    size_t tunnel_rows = 0, value_rows = 0;
    std::istringstream lines(stream);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find("Tunnel,") != std::string::npos) {
            CHECK(line.back() == ',');
            ++tunnel_rows;
        }
        if (line.find("Trees,") != std::string::npos && line.back() != ',') ++value_rows;
    }
    CHECK(tunnel_rows == 30);
    CHECK(value_rows == 30);
}

TEST_CASE("config documents parse, validate and hash stably") {
    const std::string text = R"({
        "signals": {"GPS": ["C1C"], "Galileo": ["C1C"]},
        "elevation_cutoff_deg": 10.0,
        "iono_policy": "zero-if-absent",
        "clock_grouping": "common",
        "master_seed": 7,
        "classifier": {"model": "mlr", "train_size": 100},
        "error_fit": {"h_fraction": 0.8},
        "paths": {"out_dir": "somewhere"}
    })";
    const PipelineConfig c = config_from_json_text(text, "test");
    CHECK(c.residuals.elevation_cutoff_rad == doctest::Approx(10.0 * 3.141592653589793 / 180.0));
    CHECK(c.residuals.iono_policy == IonoPolicy::zero_if_absent);
    CHECK(c.residuals.clock_grouping == ClockGrouping::common);
    CHECK(c.master_seed == 7);
    CHECK(c.classifier.kind == ClassifierKind::mlr);
    CHECK(c.error_fit.h_fraction == 0.8);
    CHECK(c.paths.out_dir == "somewhere");

    const PipelineConfig again = config_from_json_text(text, "test");
    CHECK(c.hash() == again.hash());
    PipelineConfig tweaked = c;
    tweaked.master_seed = 8;
    CHECK(tweaked.hash() != c.hash());

    CHECK_THROWS_AS((void)config_from_json_text("{ not json", "test"), Error);
    CHECK_THROWS_AS((void)config_from_json_text(R"({"feature_window": 2})", "test"), Error);
    CHECK_THROWS_AS((void)config_from_json_text(R"({"iono_policy": "maybe"})", "test"), Error);
    CHECK_THROWS_AS((void)config_from_json_text(R"({"signals": {"GPS": ["X9X"]}})", "test"),
                    Error);
    CHECK_THROWS_AS((void)config_from_json_text(R"({"error_fit": {"h_fraction": 0.3}})", "test"),
                    Error);
}

TEST_CASE("every output embeds the config hash") {
    testdata::TempDir dir;
    PipelineConfig c = small_config(dir);
    run_synth(c);
    run_extract(c);
    run_featurize(c);
    const std::string hash = c.hash();
    for (const char* name : {"obs.csv", "residuals.csv", "features.csv"}) {
        const std::string content = testdata::read_file(dir.file(std::string("out/") + name));
        CHECK(content.find("# config=" + hash) != std::string::npos);
    }
    const std::string models = testdata::read_file(dir.file("out/truth_models.json"));
    CHECK(models.find(hash) != std::string::npos);
}
