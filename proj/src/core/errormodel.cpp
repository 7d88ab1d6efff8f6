#include "core/errormodel.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/mcd.hpp"
#include "core/rng.hpp"

namespace railenv {

std::string to_string(const ModelKey& key) {
    std::string s = key.label ? class_name(*key.label) : "any";
    s += "/";
    s += constellation_name(key.constellation);
    s += "/";
    s += key.band_code;
    return s;
}

const GaussianErrorModel& ErrorModelSet::resolve(const ModelKey& key) const {
    auto it = models.find(key);
    if (it != models.end()) return it->second;
    if (fallback) return *fallback;
    throw_input("no error model for key " + to_string(key) + " and no fallback");
}

namespace {

GaussianErrorModel fit_group(const ModelKey& key, const std::vector<double>& eps,
                             double h_fraction, uint64_t seed) {
    GaussianErrorModel model;
    model.key = key;
    model.sample_count = eps.size();
    model.h_fraction = h_fraction;

    const size_t n = eps.size();
    const size_t h = std::min<size_t>(n, static_cast<size_t>(
        std::ceil(h_fraction * static_cast<double>(n))));

    const McdResult mcd = fast_mcd_1d(eps, std::max<size_t>(h, (n + 3) / 2), seed);
    model.mean_m = mcd.location(0);
    model.variance_m2 = mcd.scatter(0, 0);

    double mean = 0.0;
    for (double v : eps) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : eps) ss += (v - mean) * (v - mean);
    model.classical_variance_m2 = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return model;
}

}  // namespace

ErrorModelSet fit_error_models(const std::vector<ResidualRecord>& records, const FitConfig& config,
                               uint64_t seed, FitReport* report) {
    std::map<ModelKey, std::vector<double>> groups;
    std::vector<double> pooled;
    pooled.reserve(records.size());
    for (const auto& rec : records) {
        pooled.push_back(rec.epsilon_m);
        ModelKey key{config.group_by_class ? rec.label : std::nullopt, rec.sat.constellation,
                     rec.band_code};
        if (config.group_by_class && !rec.label) continue;  // unlabeled feeds only the fallback
        groups[key].push_back(rec.epsilon_m);
    }

    ErrorModelSet set;
    size_t fitted = 0;
    for (const auto& [key, eps] : groups) {
        if (eps.size() < config.min_group_size) {
            if (report) report->skipped_small_groups.emplace_back(key, eps.size());
            continue;
        }
        set.models[key] = fit_group(key, eps, config.h_fraction,
                                    derive_seed(seed, static_cast<uint64_t>(fitted)));
        ++fitted;
    }
    if (set.models.empty())
        throw_input("no residual group reaches the minimum fit size of " +
                    std::to_string(config.min_group_size));

    ModelKey pooled_key{std::nullopt, Constellation::gps, "*"};
    set.fallback = fit_group(pooled_key, pooled, config.h_fraction, derive_seed(seed, 0xfa11));
    return set;
}

double sample_one_error(const GaussianErrorModel& model, uint64_t seed, uint64_t epoch_index,
                        uint64_t slot_index) {
    Rng rng(derive_seed(seed, epoch_index, slot_index, 0x5a3f));
    return model.mean_m + std::sqrt(model.variance_m2) * rng.next_normal();
}

std::vector<SampledError> sample_errors(const ErrorModelSet& models,
                                        const std::vector<ScheduleEpoch>& schedule,
                                        uint64_t seed) {
    std::vector<SampledError> stream;
    for (size_t e = 0; e < schedule.size(); ++e) {
        const ScheduleEpoch& epoch = schedule[e];
        for (size_t s = 0; s < epoch.entries.size(); ++s) {
            const ScheduleEntry& entry = epoch.entries[s];
            SampledError out;
            out.time = epoch.time;
            out.sat = entry.sat;
            out.band_code = entry.band_code;
            out.label = entry.label;
            if (!epoch.no_signal) {
                const GaussianErrorModel& model =
                    models.resolve({entry.label, entry.sat.constellation, entry.band_code});
                out.error_m = sample_one_error(model, seed, e, s);
            }
            stream.push_back(std::move(out));
        }
    }
    return stream;
}

}  // namespace railenv
