#include "core/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace railenv {

using nlohmann::json;

namespace {

constexpr uint64_t fnv_offset = 1469598103934665603ULL;
constexpr uint64_t fnv_prime = 1099511628211ULL;

std::string fnv1a_hex(const std::string& text) {
    uint64_t h = fnv_offset;
    for (unsigned char c : text) {
        h ^= c;
        h *= fnv_prime;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Constellation parse_constellation(const std::string& name, const std::string& ctx) {
    const auto c = constellation_from_name(name);
    if (!c) throw_input(ctx + ": unknown constellation '" + name + "'");
    return *c;
}

IonoPolicy parse_iono_policy(const std::string& s, const std::string& ctx) {
    if (s == "require") return IonoPolicy::require;
    if (s == "zero-if-absent") return IonoPolicy::zero_if_absent;
    throw_input(ctx + ": iono_policy must be 'require' or 'zero-if-absent'");
}

ClockGrouping parse_clock_grouping(const std::string& s, const std::string& ctx) {
    if (s == "common") return ClockGrouping::common;
    if (s == "per-constellation") return ClockGrouping::per_constellation;
    if (s == "per-constellation-band") return ClockGrouping::per_constellation_band;
    throw_input(ctx + ": unknown clock_grouping '" + s + "'");
}

ClassifierKind parse_classifier_kind(const std::string& s, const std::string& ctx) {
    if (s == "mlr") return ClassifierKind::mlr;
    if (s == "gbt") return ClassifierKind::gbt;
    throw_input(ctx + ": classifier model must be 'mlr' or 'gbt'");
}

DatasetPolicy parse_policy(const std::string& s, const std::string& ctx) {
    if (s == "clear-only") return DatasetPolicy::clear_only;
    if (s == "all-classes") return DatasetPolicy::all_classes;
    throw_input(ctx + ": dataset_policy must be 'clear-only' or 'all-classes'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace

std::vector<SynthClassConfig> SynthConfig::default_classes() {
    return {
        {EnvironmentClass::station, 240.0, 44.0, 1.0, 0.0, 4.0, true},
        {EnvironmentClass::open_sky_rural, 300.0, 48.0, 1.0, 0.0, 1.2, false},
        {EnvironmentClass::trees, 300.0, 40.0, 1.5, 0.3, 7.7, false},
        {EnvironmentClass::buildings, 240.0, 36.0, 2.0, 0.8, 19.0, false},
    };
}

PipelineConfig config_from_json_text(const std::string& text, const std::string& context) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw_input(context + ": " + e.what());
    }

    PipelineConfig c;
    if (j.contains("signals")) {
        c.signals.codes.clear();
        for (const auto& [name, codes] : j.at("signals").items()) {
            const Constellation constellation = parse_constellation(name, context);
            for (const auto& code : codes) {
                const std::string s = code.get<std::string>();
                if (s.size() != 3 || s[0] != 'C')
                    throw_input(context + ": observation code '" + s + "' must look like C1C");
                carrier_frequency(constellation, s);  // validates the band digit
                c.signals.codes[constellation].push_back(s);
            }
        }
        if (c.signals.codes.empty()) throw_input(context + ": signals must not be empty");
    }

    c.residuals.elevation_cutoff_rad =
        get_or(j, "elevation_cutoff_deg", 5.0) * constants::deg2rad;
    if (c.residuals.elevation_cutoff_rad < 0.0)
        throw_input(context + ": elevation cutoff must be non-negative");
    c.residuals.use_troposphere = get_or(j, "use_troposphere", true);
    c.residuals.iono_policy =
        parse_iono_policy(get_or<std::string>(j, "iono_policy", "require"), context);
    c.residuals.clock_grouping = parse_clock_grouping(
        get_or<std::string>(j, "clock_grouping", "per-constellation-band"), context);

    c.feature_window = get_or<size_t>(j, "feature_window", 1);
    if (c.feature_window == 0 || c.feature_window % 2 == 0)
        throw_input(context + ": feature_window must be odd");
    c.master_seed = get_or<uint64_t>(j, "master_seed", 42);

    if (j.contains("classifier")) {
        const json& jc = j.at("classifier");
        c.classifier.kind =
            parse_classifier_kind(get_or<std::string>(jc, "model", "gbt"), context);
        c.classifier.train_size = get_or<size_t>(jc, "train_size", 2000);
        c.classifier.dataset_policy =
            parse_policy(get_or<std::string>(jc, "dataset_policy", "clear-only"), context);
        c.classifier.importance_repeats = get_or<size_t>(jc, "importance_repeats", 5);
        if (jc.contains("mlr")) {
            const json& jm = jc.at("mlr");
            if (jm.contains("lambda_grid"))
                c.classifier.mlr.lambda_grid = jm.at("lambda_grid").get<std::vector<double>>();
            c.classifier.mlr.max_iterations =
                get_or<size_t>(jm, "max_iterations", c.classifier.mlr.max_iterations);
            if (c.classifier.mlr.lambda_grid.empty())
                throw_input(context + ": lambda_grid must not be empty");
        }
        if (jc.contains("gbt")) {
            const json& jg = jc.at("gbt");
            c.classifier.gbt.n_rounds = get_or<size_t>(jg, "n_rounds", c.classifier.gbt.n_rounds);
            c.classifier.gbt.max_depth = get_or<int>(jg, "max_depth", c.classifier.gbt.max_depth);
            c.classifier.gbt.learning_rate =
                get_or<double>(jg, "learning_rate", c.classifier.gbt.learning_rate);
            c.classifier.gbt.min_leaf = get_or<size_t>(jg, "min_leaf", c.classifier.gbt.min_leaf);
            if (c.classifier.gbt.learning_rate <= 0.0 || c.classifier.gbt.max_depth < 0)
                throw_input(context + ": bad gbt parameters");
        }
    }

    if (j.contains("error_fit")) {
        const json& je = j.at("error_fit");
        c.error_fit.h_fraction = get_or<double>(je, "h_fraction", 0.75);
        c.error_fit.min_group_size = get_or<size_t>(je, "min_group_size", 50);
        c.error_fit.group_by_class = get_or<bool>(je, "group_by_class", true);
        if (c.error_fit.h_fraction <= 0.5 || c.error_fit.h_fraction > 1.0)
            throw_input(context + ": h_fraction must be in (0.5, 1]");
    }

    if (j.contains("simulate"))
        c.simulate.tunnel_no_signal = get_or<bool>(j.at("simulate"), "tunnel_no_signal", true);

    if (j.contains("synth")) {
        const json& js = j.at("synth");
        SynthConfig& s = c.synth;
        s.start_week = get_or<int>(js, "start_week", s.start_week);
        s.start_sow = get_or<double>(js, "start_sow", s.start_sow);
        s.duration_s = get_or<double>(js, "duration_s", s.duration_s);
        s.rate_hz = get_or<double>(js, "rate_hz", s.rate_hz);
        s.origin_lat_deg = get_or<double>(js, "origin_lat_deg", s.origin_lat_deg);
        s.origin_lon_deg = get_or<double>(js, "origin_lon_deg", s.origin_lon_deg);
        s.height_m = get_or<double>(js, "height_m", s.height_m);
        s.speed_mps = get_or<double>(js, "speed_mps", s.speed_mps);
        s.heading_deg = get_or<double>(js, "heading_deg", s.heading_deg);
        s.curve_deg_per_km = get_or<double>(js, "curve_deg_per_km", s.curve_deg_per_km);
        s.n_gps = get_or<size_t>(js, "n_gps", s.n_gps);
        s.n_galileo = get_or<size_t>(js, "n_galileo", s.n_galileo);
        s.receiver_clock_amplitude_s =
            get_or<double>(js, "receiver_clock_amplitude_s", s.receiver_clock_amplitude_s);
        s.receiver_clock_period_s =
            get_or<double>(js, "receiver_clock_period_s", s.receiver_clock_period_s);
        s.cn0_elevation_gain_db =
            get_or<double>(js, "cn0_elevation_gain_db", s.cn0_elevation_gain_db);
        if (js.contains("classes")) {
            s.classes.clear();
            for (const auto& jcls : js.at("classes")) {
                SynthClassConfig cls;
                const auto label = parse_class(jcls.at("name").get<std::string>());
                if (!label) throw_input(context + ": unknown synth class name");
                cls.label = *label;
                cls.duration_s = get_or<double>(jcls, "duration_s", 300.0);
                cls.cn0_base_dbhz = get_or<double>(jcls, "cn0_base", 45.0);
                cls.cn0_sigma_dbhz = get_or<double>(jcls, "cn0_sigma", 1.0);
                cls.error_mean_m = get_or<double>(jcls, "error_mean_m", 0.0);
                cls.error_var_m2 = get_or<double>(jcls, "error_var_m2", 1.0);
                cls.stationary = get_or<bool>(jcls, "stationary", false);
                if (cls.duration_s <= 0.0 || cls.error_var_m2 < 0.0)
                    throw_input(context + ": bad synth class parameters");
                s.classes.push_back(cls);
            }
        }
        if (s.duration_s <= 0.0 || s.rate_hz <= 0.0 || (s.n_gps + s.n_galileo) == 0)
            throw_input(context + ": bad synth scenario parameters");
    }
    if (c.synth.classes.empty()) c.synth.classes = SynthConfig::default_classes();

    if (j.contains("paths")) {
        const json& jp = j.at("paths");
        c.paths.obs = get_or<std::string>(jp, "obs", "");
        c.paths.nav = get_or<std::string>(jp, "nav", "");
        c.paths.truth = get_or<std::string>(jp, "truth", "");
        c.paths.labels = get_or<std::string>(jp, "labels", "");
        c.paths.out_dir = get_or<std::string>(jp, "out_dir", "out");
        c.paths.residuals = get_or<std::string>(jp, "residuals", "");
        c.paths.features = get_or<std::string>(jp, "features", "");
        c.paths.model = get_or<std::string>(jp, "model", "");
        c.paths.error_models = get_or<std::string>(jp, "error_models", "");
        c.paths.stream = get_or<std::string>(jp, "stream", "");
    }
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_input("cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json_text(text, path);
}

std::string config_to_json_text(const PipelineConfig& c) {
    json j;
    json signals;
    for (const auto& [constellation, codes] : c.signals.codes)
        signals[constellation_name(constellation)] = codes;
    j["signals"] = signals;
    j["elevation_cutoff_deg"] = c.residuals.elevation_cutoff_rad * constants::rad2deg;
    j["use_troposphere"] = c.residuals.use_troposphere;
    j["iono_policy"] =
        c.residuals.iono_policy == IonoPolicy::require ? "require" : "zero-if-absent";
    switch (c.residuals.clock_grouping) {
        case ClockGrouping::common: j["clock_grouping"] = "common"; break;
        case ClockGrouping::per_constellation: j["clock_grouping"] = "per-constellation"; break;
        case ClockGrouping::per_constellation_band:
            j["clock_grouping"] = "per-constellation-band";
            break;
    }
    j["feature_window"] = c.feature_window;
    j["master_seed"] = c.master_seed;

    json jc;
    jc["model"] = c.classifier.kind == ClassifierKind::mlr ? "mlr" : "gbt";
    jc["train_size"] = c.classifier.train_size;
    jc["dataset_policy"] =
        c.classifier.dataset_policy == DatasetPolicy::clear_only ? "clear-only" : "all-classes";
    jc["importance_repeats"] = c.classifier.importance_repeats;
    jc["mlr"] = {{"lambda_grid", c.classifier.mlr.lambda_grid},
                 {"max_iterations", c.classifier.mlr.max_iterations}};
    jc["gbt"] = {{"n_rounds", c.classifier.gbt.n_rounds},
                 {"max_depth", c.classifier.gbt.max_depth},
                 {"learning_rate", c.classifier.gbt.learning_rate},
                 {"min_leaf", c.classifier.gbt.min_leaf}};
    j["classifier"] = jc;

    j["error_fit"] = {{"h_fraction", c.error_fit.h_fraction},
                      {"min_group_size", c.error_fit.min_group_size},
                      {"group_by_class", c.error_fit.group_by_class}};
    j["simulate"] = {{"tunnel_no_signal", c.simulate.tunnel_no_signal}};

    json jcls = json::array();
    for (const auto& cls : c.synth.classes) {
        jcls.push_back({{"name", class_name(cls.label)},
                        {"duration_s", cls.duration_s},
                        {"cn0_base", cls.cn0_base_dbhz},
                        {"cn0_sigma", cls.cn0_sigma_dbhz},
                        {"error_mean_m", cls.error_mean_m},
                        {"error_var_m2", cls.error_var_m2},
                        {"stationary", cls.stationary}});
    }
    j["synth"] = {{"start_week", c.synth.start_week},
                  {"start_sow", c.synth.start_sow},
                  {"duration_s", c.synth.duration_s},
                  {"rate_hz", c.synth.rate_hz},
                  {"origin_lat_deg", c.synth.origin_lat_deg},
                  {"origin_lon_deg", c.synth.origin_lon_deg},
                  {"height_m", c.synth.height_m},
                  {"speed_mps", c.synth.speed_mps},
                  {"heading_deg", c.synth.heading_deg},
                  {"curve_deg_per_km", c.synth.curve_deg_per_km},
                  {"n_gps", c.synth.n_gps},
                  {"n_galileo", c.synth.n_galileo},
                  {"receiver_clock_amplitude_s", c.synth.receiver_clock_amplitude_s},
                  {"receiver_clock_period_s", c.synth.receiver_clock_period_s},
                  {"cn0_elevation_gain_db", c.synth.cn0_elevation_gain_db},
                  {"classes", jcls}};

    j["paths"] = {{"obs", c.paths.obs},           {"nav", c.paths.nav},
                  {"truth", c.paths.truth},       {"labels", c.paths.labels},
                  {"out_dir", c.paths.out_dir},   {"residuals", c.paths.residuals},
                  {"features", c.paths.features}, {"model", c.paths.model},
                  {"error_models", c.paths.error_models}, {"stream", c.paths.stream}};
    return j.dump(2);
}

std::string PipelineConfig::hash() const {
    // Paths are excluded: the hash identifies the processing parameters, so a
    // rerun into a different directory still reproduces byte-identical data.
    json j = json::parse(config_to_json_text(*this));
    j.erase("paths");
    return fnv1a_hex(j.dump());
}

namespace {

std::string resolve(const PipelineConfig& c, const std::string& explicit_path,
                    const char* default_name) {
    if (!explicit_path.empty()) return explicit_path;
    std::filesystem::create_directories(c.paths.out_dir);
    return (std::filesystem::path(c.paths.out_dir) / default_name).string();
}

}  // namespace

std::string resolved_residuals_path(const PipelineConfig& c) {
    return resolve(c, c.paths.residuals, "residuals.csv");
}
std::string resolved_features_path(const PipelineConfig& c) {
    return resolve(c, c.paths.features, "features.csv");
}
std::string resolved_model_path(const PipelineConfig& c) {
    return resolve(c, c.paths.model, "model.json");
}
std::string resolved_error_models_path(const PipelineConfig& c) {
    return resolve(c, c.paths.error_models, "error_models.json");
}
std::string resolved_stream_path(const PipelineConfig& c) {
    return resolve(c, c.paths.stream, "injected_errors.csv");
}

}  // namespace railenv
