#include "core/synth.hpp"

#include <cmath>

#include "core/atmosphere.hpp"
#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/mcd.hpp"
#include "core/residuals.hpp"
#include "core/rng.hpp"

namespace railenv {

namespace cst = constants;

std::vector<BroadcastEphemeris> nominal_constellation(Constellation constellation, size_t count,
                                                      const GnssTime& reference_time) {
    const bool galileo = constellation == Constellation::galileo;
    const size_t planes = galileo ? 3 : 6;
    const double inclination = (galileo ? 56.0 : 55.0) * cst::deg2rad;
    const double sqrt_a = galileo ? std::sqrt(29600000.0) : std::sqrt(26560000.0);

    std::vector<BroadcastEphemeris> shell;
    shell.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        const size_t plane = i % planes;
        const size_t slot = i / planes;
        BroadcastEphemeris e;
        e.sat = {constellation, static_cast<int>(i) + 1};
        e.toe = reference_time;
        e.toc = reference_time;
        e.sqrt_a = sqrt_a + 0.02 * static_cast<double>(i % 5);
        e.ecc = 0.003 + 0.0015 * static_cast<double>(i % 7);
        e.i0 = inclination + 0.01 * (static_cast<double>(i % 3) - 1.0);
        e.omega0 = 2.0 * cst::pi * static_cast<double>(plane) / static_cast<double>(planes) +
                   0.03 * static_cast<double>(slot);
        e.omega = 0.6 * static_cast<double>(i);
        e.m0 = std::fmod(2.0 * cst::pi * static_cast<double>(slot) /
                                 std::max<double>(1.0, std::ceil(static_cast<double>(count) /
                                                                 static_cast<double>(planes))) +
                             0.35 * static_cast<double>(plane),
                         2.0 * cst::pi);
        e.delta_n = 4.5e-9;
        e.i_dot = (static_cast<double>(i % 3) - 1.0) * 1e-10;
        e.omega_dot = -8.0e-9;
        e.cuc = 2.0e-6 * (static_cast<double>(i % 4) - 1.5);
        e.cus = 7.0e-6 + 1.0e-7 * static_cast<double>(i % 5);
        e.crc = 220.0 + 5.0 * static_cast<double>(i % 6);
        e.crs = -40.0 + 4.0 * static_cast<double>(i % 7);
        e.cic = 1.5e-7 * (static_cast<double>(i % 5) - 2.0);
        e.cis = 9.0e-8 * (static_cast<double>(i % 3) - 1.0);
        e.af0 = 1.0e-5 * (static_cast<double>(i) - 0.5 * static_cast<double>(count));
        e.af1 = 1.0e-11 * (static_cast<double>(i % 3) - 1.0);
        e.af2 = 0.0;
        e.tgd_s = 1.0e-9 * (static_cast<double>(i % 6) - 2.0);
        e.health = 0;
        shell.push_back(e);
    }
    return shell;
}

namespace {

struct EnuBasis {
    EcefPosition east, north, up;
    EcefPosition origin;
};

EnuBasis basis_at(const GeodeticPosition& g) {
    const double sin_lat = std::sin(g.lat_rad), cos_lat = std::cos(g.lat_rad);
    const double sin_lon = std::sin(g.lon_rad), cos_lon = std::cos(g.lon_rad);
    EnuBasis b;
    b.east = {-sin_lon, cos_lon, 0.0};
    b.north = {-sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat};
    b.up = {cos_lat * cos_lon, cos_lat * sin_lon, sin_lat};
    b.origin = geodetic_to_ecef(g);
    return b;
}

const SynthClassConfig& class_at(const std::vector<SynthClassConfig>& classes, double t,
                                 double cycle_s) {
    double phase = std::fmod(t, cycle_s);
    for (const auto& cls : classes) {
        if (phase < cls.duration_s) return cls;
        phase -= cls.duration_s;
    }
    return classes.back();
}

}  // namespace

SyntheticScenario generate_scenario(const SynthConfig& synth, const ObsCodeConfig& signals,
                                    const ResidualConfig& residuals, uint64_t seed,
                                    double truth_h_fraction) {
    if (synth.classes.empty()) throw_input("synthetic scenario needs at least one class");

    SyntheticScenario scenario;
    const GnssTime start = normalized({synth.start_week, synth.start_sow});
    const GnssTime mid = start.plus(0.5 * synth.duration_s);

    // Constellation shells.
    for (const auto& e : nominal_constellation(Constellation::gps, synth.n_gps, mid))
        scenario.ephemerides.add(e);
    for (const auto& e : nominal_constellation(Constellation::galileo, synth.n_galileo, mid))
        scenario.ephemerides.add(e);

    scenario.iono.alpha = {1.1176e-8, 2.2352e-8, -5.9605e-8, -1.1921e-7};
    scenario.iono.beta = {9.0112e4, 1.6384e4, -1.9661e5, -6.5536e4};

    // Label timeline: classes repeat in order until the journey ends.
    double cycle_s = 0.0;
    for (const auto& cls : synth.classes) cycle_s += cls.duration_s;
    {
        double t = 0.0;
        size_t idx = 0;
        while (t < synth.duration_s) {
            const SynthClassConfig& cls = synth.classes[idx % synth.classes.size()];
            const double end = std::min(t + cls.duration_s, synth.duration_s);
            scenario.labels.intervals.push_back({start.plus(t), start.plus(end), cls.label});
            t = end;
            ++idx;
        }
    }

    // Trajectory: heading integrated over distance in the local tangent plane.
    const GeodeticPosition origin{synth.origin_lat_deg * cst::deg2rad,
                                  synth.origin_lon_deg * cst::deg2rad, synth.height_m};
    const EnuBasis basis = basis_at(origin);

    const double dt = 1.0 / synth.rate_hz;
    const auto n_epochs = static_cast<size_t>(std::floor(synth.duration_s * synth.rate_hz));
    const auto signal_list = signals.ordered();

    double east = 0.0, north = 0.0, distance_m = 0.0;
    for (size_t k = 0; k < n_epochs; ++k) {
        const double t_rel = static_cast<double>(k) * dt;
        const GnssTime t = start.plus(t_rel);
        const SynthClassConfig& cls = class_at(synth.classes, t_rel, cycle_s);

        const EcefPosition pos{
            basis.origin.x + east * basis.east.x + north * basis.north.x,
            basis.origin.y + east * basis.east.y + north * basis.north.y,
            basis.origin.z + east * basis.east.z + north * basis.north.z};
        scenario.truth.samples.push_back({t, pos});

        // Advance for the next epoch.
        if (!cls.stationary) {
            const double heading =
                synth.heading_deg * cst::deg2rad +
                synth.curve_deg_per_km * cst::deg2rad * distance_m / 1000.0;
            east += synth.speed_mps * dt * std::sin(heading);
            north += synth.speed_mps * dt * std::cos(heading);
            distance_m += synth.speed_mps * dt;
        }

        if (cls.label == EnvironmentClass::tunnel) continue;  // no signal underground

        const double rx_clock_s =
            synth.receiver_clock_amplitude_s *
            std::sin(2.0 * cst::pi * t_rel / synth.receiver_clock_period_s);
        const GeodeticPosition rx_geo = ecef_to_geodetic(pos);

        ObservationEpoch epoch;
        epoch.time = t;
        const size_t epoch_first_injected = scenario.injected.size();
        size_t slot = 0;
        for (const auto& [sat, records] : scenario.ephemerides.by_satellite()) {
            for (const auto& [constellation, code] : signal_list) {
                const size_t this_slot = slot++;
                if (sat.constellation != constellation) continue;
                const BroadcastEphemeris& eph = records.front();
                const RangeResult range = geometric_range(pos, t, eph);
                if (range.azel.elevation_rad < residuals.elevation_cutoff_rad) continue;

                const double freq = carrier_frequency(constellation, code);
                const double freq_scale = (cst::freq_l1 / freq) * (cst::freq_l1 / freq);
                const double iono_m =
                    klobuchar_delay(scenario.iono, rx_geo.lat_rad, rx_geo.lon_rad, range.azel, t,
                                    freq);
                const double tropo_m =
                    residuals.use_troposphere
                        ? tropospheric_delay(range.azel, rx_geo.height_m)
                        : 0.0;

                Rng err_rng(derive_seed(seed, k, this_slot, 0xe5));
                const double epsilon =
                    cls.error_mean_m + std::sqrt(cls.error_var_m2) * err_rng.next_normal();

                SatSignalObservation obs;
                obs.sat = sat;
                obs.band_code = code;
                obs.pseudorange_m = range.range_m + cst::speed_of_light * rx_clock_s -
                                    cst::speed_of_light * range.sat_state.clock_offset_s +
                                    eph.tgd_s * cst::speed_of_light * freq_scale + tropo_m +
                                    iono_m + epsilon;

                Rng cn0_rng(derive_seed(seed, k, this_slot, 0xc0));
                double cn0 = cls.cn0_base_dbhz +
                             synth.cn0_elevation_gain_db *
                                 (std::sin(range.azel.elevation_rad) - 0.7) +
                             cls.cn0_sigma_dbhz * cn0_rng.next_normal();
                cn0 = std::min(69.9, std::max(2.0, cn0));
                obs.cn0_dbhz = cn0;

                epoch.observations.push_back(std::move(obs));
                scenario.injected.push_back({t, sat, code, cls.label, epsilon, epsilon});
            }
        }

        // Observable error: remove the per-epoch common mode the receiver
        // clock estimate will absorb, per clock group.
        std::map<std::pair<Constellation, std::string>, std::vector<double>> group_values;
        for (size_t i = epoch_first_injected; i < scenario.injected.size(); ++i) {
            const auto& inj = scenario.injected[i];
            auto key = std::make_pair(inj.sat.constellation, inj.band_code);
            if (residuals.clock_grouping == ClockGrouping::common) key = {Constellation::gps, ""};
            else if (residuals.clock_grouping == ClockGrouping::per_constellation) key.second = "";
            group_values[key].push_back(inj.epsilon_m);
        }
        std::map<std::pair<Constellation, std::string>, double> group_median;
        for (const auto& [key, values] : group_values)
            group_median[key] = estimate_receiver_clock(values);
        for (size_t i = epoch_first_injected; i < scenario.injected.size(); ++i) {
            auto& inj = scenario.injected[i];
            auto key = std::make_pair(inj.sat.constellation, inj.band_code);
            if (residuals.clock_grouping == ClockGrouping::common) key = {Constellation::gps, ""};
            else if (residuals.clock_grouping == ClockGrouping::per_constellation) key.second = "";
            inj.observable_m = inj.epsilon_m - group_median.at(key);
        }

        if (!epoch.observations.empty()) scenario.epochs.push_back(std::move(epoch));
    }

    // Advertised ground-truth models from the observable injected samples.
    std::map<ModelKey, std::vector<double>> by_key;
    for (const auto& inj : scenario.injected)
        by_key[{inj.label, inj.sat.constellation, inj.band_code}].push_back(inj.observable_m);
    for (const auto& [key, values] : by_key) {
        GaussianErrorModel m;
        m.key = key;
        m.sample_count = values.size();
        m.h_fraction = truth_h_fraction;
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        m.mean_m = mean;
        m.classical_variance_m2 =
            values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
        if (values.size() >= 20 && m.classical_variance_m2 > 1e-18) {
            const size_t h = static_cast<size_t>(
                std::ceil(truth_h_fraction * static_cast<double>(values.size())));
            const McdResult robust = fast_mcd_1d(values, h, derive_seed(seed, 0x72f));
            m.variance_m2 = robust.scatter(0, 0);
        } else {
            m.variance_m2 = m.classical_variance_m2;
        }
        scenario.truth_models.models[m.key] = m;
    }
    return scenario;
}

}  // namespace railenv
