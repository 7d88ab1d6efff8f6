#include "core/context.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace railenv {

SampleStats sample_stats(const std::vector<double>& values) {
    if (values.empty()) throw_input("sample_stats requires a non-empty sample");
    const auto n = static_cast<double>(values.size());

    SampleStats s;
    s.min = values[0];
    s.max = values[0];
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.variance = values.size() > 1 ? m2 * n / (n - 1.0) : 0.0;

    if (m2 > 0.0) {
        if (values.size() >= 3) s.skewness = m3 / std::pow(m2, 1.5);
        if (values.size() >= 4) s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

FeatureSchema FeatureSchema::build(
    const std::vector<std::pair<Constellation, std::string>>& signals) {
    FeatureSchema schema;
    schema.signals_ = signals;
    for (const auto& [c, code] : signals) {
        const std::string prefix = std::string(1, constellation_letter(c)) + "_" + code + "_cn0_";
        for (const char* stat : {"mean", "min", "max", "var", "skew", "kurt"})
            schema.names_.push_back(prefix + stat);
    }
    for (const auto& [c, code] : signals) {
        if (std::find(schema.constellations_.begin(), schema.constellations_.end(), c) ==
            schema.constellations_.end())
            schema.constellations_.push_back(c);
    }
    for (Constellation c : schema.constellations_) {
        const std::string prefix = std::string(1, constellation_letter(c)) + "_";
        for (const char* name :
             {"sat_count", "elev_mean", "elev_max", "elev_min", "pdop", "hdop", "vdop"})
            schema.names_.push_back(prefix + name);
    }
    schema.names_.push_back("total_sat_count");
    return schema;
}

std::string schema_hash_from_names(const std::vector<std::string>& names) {
    // FNV-1a over the versioned name list.
    uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= '\n';
        h *= 1099511628211ULL;
    };
    feed("feature-schema-v1");
    for (const auto& name : names) feed(name);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string FeatureSchema::hash() const { return schema_hash_from_names(names_); }

namespace {

struct Dops {
    double pdop = 0.0, hdop = 0.0, vdop = 0.0;
};

/// DOPs from unit lines of sight in the local ENU frame; 4-state geometry.
std::optional<Dops> compute_dops(const std::vector<AzEl>& sats) {
    if (sats.size() < 4) return std::nullopt;
    Eigen::MatrixXd g(sats.size(), 4);
    for (size_t i = 0; i < sats.size(); ++i) {
        const double ce = std::cos(sats[i].elevation_rad);
        g(static_cast<Eigen::Index>(i), 0) = ce * std::sin(sats[i].azimuth_rad);
        g(static_cast<Eigen::Index>(i), 1) = ce * std::cos(sats[i].azimuth_rad);
        g(static_cast<Eigen::Index>(i), 2) = std::sin(sats[i].elevation_rad);
        g(static_cast<Eigen::Index>(i), 3) = 1.0;
    }
    const Eigen::Matrix4d gtg = g.transpose() * g;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(gtg);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::Matrix4d q = lu.inverse();
    Dops d;
    d.hdop = std::sqrt(q(0, 0) + q(1, 1));
    d.vdop = std::sqrt(q(2, 2));
    d.pdop = std::sqrt(q(0, 0) + q(1, 1) + q(2, 2));
    return d;
}

}  // namespace

FeatureVector featurize_epoch(const ObservationEpoch& epoch, const EpochGeometry& geometry,
                              const FeatureSchema& schema, double elevation_cutoff_rad) {
    FeatureVector fv;
    fv.time = epoch.time;
    fv.values.assign(schema.size(), 0.0);
    fv.mask.assign(schema.size(), false);

    size_t slot = 0;
    auto put = [&](double v) {
        fv.values[slot] = v;
        fv.mask[slot] = true;
        ++slot;
    };
    auto put_opt = [&](const std::optional<double>& v) {
        if (v) put(*v);
        else ++slot;
    };

    auto visible = [&](const SatSignalObservation& obs) -> const AzEl* {
        auto it = geometry.look.find(obs.sat);
        if (it == geometry.look.end()) return nullptr;
        if (it->second.elevation_rad < elevation_cutoff_rad) return nullptr;
        return &it->second;
    };

    // C/N0 statistics per configured signal.
    for (const auto& [c, code] : schema.signals()) {
        std::vector<double> cn0;
        for (const auto& obs : epoch.observations) {
            if (obs.sat.constellation != c || obs.band_code != code) continue;
            if (!visible(obs)) continue;
            if (obs.cn0_dbhz) cn0.push_back(*obs.cn0_dbhz);
        }
        if (cn0.empty()) {
            slot += 6;
            continue;
        }
        const SampleStats st = sample_stats(cn0);
        put(st.mean);
        put(st.min);
        put(st.max);
        put(st.variance);
        put_opt(st.skewness);
        put_opt(st.kurtosis);
    }

    // Geometry per constellation.
    size_t total_count = 0;
    for (Constellation c : schema.constellations()) {
        std::vector<AzEl> look;
        std::vector<double> elevations;
        std::vector<SatelliteId> counted;
        for (const auto& obs : epoch.observations) {
            if (obs.sat.constellation != c) continue;
            if (std::find(counted.begin(), counted.end(), obs.sat) != counted.end()) continue;
            const AzEl* azel = visible(obs);
            if (!azel) continue;
            counted.push_back(obs.sat);
            look.push_back(*azel);
            elevations.push_back(azel->elevation_rad);
        }
        total_count += counted.size();
        if (counted.empty()) {
            slot += 7;
            continue;
        }
        const SampleStats st = sample_stats(elevations);
        put(static_cast<double>(counted.size()));
        put(st.mean);
        put(st.max);
        put(st.min);
        const auto dops = compute_dops(look);
        if (dops) {
            put(dops->pdop);
            put(dops->hdop);
            put(dops->vdop);
        } else {
            slot += 3;
        }
    }
    put(static_cast<double>(total_count));
    return fv;
}

Dataset build_dataset(const std::vector<FeatureVector>& features,
                      const std::vector<std::optional<EnvironmentClass>>& labels,
                      DatasetPolicy policy) {
    if (features.size() != labels.size())
        throw_input("features and labels length mismatch");
    Dataset out;
    for (size_t i = 0; i < features.size(); ++i) {
        if (!labels[i]) {
            ++out.report.dropped_unlabeled;
            continue;
        }
        if (policy == DatasetPolicy::clear_only && !is_clear(*labels[i])) {
            ++out.report.dropped_mixed;
            continue;
        }
        out.samples.push_back({features[i], *labels[i]});
        ++out.report.per_class[*labels[i]];
    }
    if (out.samples.empty()) throw_input("dataset is empty after label policy filtering");
    return out;
}

Split split_dataset(const std::vector<LabeledSample>& dataset, size_t train_size, uint64_t seed) {
    if (train_size == 0 || train_size >= dataset.size())
        throw_input("train_size must be in (0, dataset size)");
    Rng rng(derive_seed(seed, /*stream=*/0x5917));
    const auto idx = shuffled_indices(dataset.size(), rng);
    Split split;
    split.train.reserve(train_size);
    split.test.reserve(dataset.size() - train_size);
    for (size_t i = 0; i < idx.size(); ++i) {
        if (i < train_size) split.train.push_back(dataset[idx[i]]);
        else split.test.push_back(dataset[idx[i]]);
    }
    return split;
}

}  // namespace railenv
