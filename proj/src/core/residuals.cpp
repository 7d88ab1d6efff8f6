#include "core/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace railenv {

namespace cst = constants;

double estimate_receiver_clock(const std::vector<double>& raw) {
    if (raw.empty()) throw_input("receiver clock estimation needs at least one residual");
    std::vector<double> sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

namespace {

struct ClockKey {
    Constellation constellation;
    std::string band;

    friend auto operator<=>(const ClockKey&, const ClockKey&) = default;
};

ClockKey group_of(const SatSignalObservation& obs, ClockGrouping grouping) {
    switch (grouping) {
        case ClockGrouping::common: return {Constellation::gps, ""};
        case ClockGrouping::per_constellation: return {obs.sat.constellation, ""};
        case ClockGrouping::per_constellation_band: return {obs.sat.constellation, obs.band_code};
    }
    return {Constellation::gps, ""};
}

}  // namespace

EpochOutcome epoch_residuals(const ObservationEpoch& epoch, const EphemerisCollection& ephemerides,
                             const EcefPosition& truth_position,
                             const std::optional<IonoParams>& iono, const ResidualConfig& config) {
    const GeodeticPosition rx_geo = ecef_to_geodetic(truth_position);

    struct Partial {
        ResidualRecord record;
        double raw_m = 0.0;
        ClockKey group;
    };
    std::vector<Partial> partials;
    bool any_ephemeris = false;

    for (const auto& obs : epoch.observations) {
        if (!ephemerides.has_valid(obs.sat, epoch.time)) continue;
        any_ephemeris = true;
        const BroadcastEphemeris& eph = ephemerides.select(obs.sat, epoch.time);

        const RangeResult range = geometric_range(truth_position, epoch.time, eph);
        if (range.azel.elevation_rad < config.elevation_cutoff_rad) continue;

        const double freq = carrier_frequency(obs.sat.constellation, obs.band_code);
        const double freq_scale = (cst::freq_l1 / freq) * (cst::freq_l1 / freq);

        AtmosphericDelays delays;
        if (iono) {
            delays.iono_m = klobuchar_delay(*iono, rx_geo.lat_rad, rx_geo.lon_rad, range.azel,
                                            epoch.time, freq);
        } else if (config.iono_policy == IonoPolicy::require) {
            throw_input("no Klobuchar coefficients available and iono policy is 'require'");
        }
        if (config.use_troposphere)
            delays.tropo_m = tropospheric_delay(range.azel, rx_geo.height_m);

        Partial p;
        p.record.time = epoch.time;
        p.record.sat = obs.sat;
        p.record.band_code = obs.band_code;
        p.record.pseudorange_m = obs.pseudorange_m;
        p.record.geometric_range_m = range.range_m;
        p.record.sat_clock_m = range.sat_state.clock_offset_s * cst::speed_of_light;
        p.record.tgd_m = eph.tgd_s * cst::speed_of_light * freq_scale;
        p.record.tropo_m = delays.tropo_m;
        p.record.iono_m = delays.iono_m;
        p.record.elevation_rad = range.azel.elevation_rad;
        p.record.azimuth_rad = range.azel.azimuth_rad;
        p.record.cn0_dbhz = obs.cn0_dbhz;
        p.group = group_of(obs, config.clock_grouping);
        // Sequential removal; what is left is receiver clock plus local error.
        p.raw_m = obs.pseudorange_m - range.range_m + p.record.sat_clock_m - p.record.tgd_m -
                  delays.tropo_m - delays.iono_m;
        partials.push_back(std::move(p));
    }

    if (partials.empty()) {
        EpochOutcome out;
        out.skip = any_ephemeris ? SkipReason::no_satellite_above_cutoff : SkipReason::no_ephemeris;
        return out;
    }

    std::map<ClockKey, std::vector<double>> raw_by_group;
    for (const auto& p : partials) raw_by_group[p.group].push_back(p.raw_m);
    std::map<ClockKey, double> clock_by_group;
    for (const auto& [key, raws] : raw_by_group) clock_by_group[key] = estimate_receiver_clock(raws);

    EpochResiduals result;
    result.time = epoch.time;
    result.rx_clock_m = clock_by_group.begin()->second;
    for (auto& p : partials) {
        const double clock = clock_by_group.at(p.group);
        p.record.rx_clock_m = clock;
        p.record.epsilon_m = p.raw_m - clock;
        p.record.outlier = std::fabs(p.record.epsilon_m) >= config.outlier_threshold_m;
        result.records.push_back(std::move(p.record));
    }
    result.satellite_count = result.records.size();

    EpochOutcome out;
    out.residuals = std::move(result);
    return out;
}

ResidualDataset residual_dataset(const AlignedJourney& journey,
                                 const EphemerisCollection& ephemerides,
                                 const std::optional<IonoParams>& iono,
                                 const ResidualConfig& config) {
    ResidualDataset dataset;
    for (const auto& aligned : journey.epochs) {
        EpochOutcome outcome =
            epoch_residuals(aligned.epoch, ephemerides, aligned.truth_position, iono, config);
        if (!outcome.residuals) {
            ++dataset.epochs_skipped;
            continue;
        }
        ++dataset.epochs_processed;
        for (auto& rec : outcome.residuals->records) {
            rec.label = aligned.label;
            dataset.records.push_back(std::move(rec));
        }
    }
    return dataset;
}

}  // namespace railenv
