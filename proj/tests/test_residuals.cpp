#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/residuals.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "oracles.hpp"
#include "test_data.hpp"

using namespace railenv;
namespace cst = constants;

namespace {

/// Neumaier-compensated reconstruction of the bookkeeping identity; returns
/// |R - (rho + clk_rx - clk_sat + tgd + tropo + iono + eps)|.
double identity_defect(const ResidualRecord& r) {
    const double terms[] = {r.geometric_range_m, r.rx_clock_m,  -r.sat_clock_m, r.tgd_m,
                            r.tropo_m,           r.iono_m,      r.epsilon_m,   -r.pseudorange_m};
    double sum = 0.0, compensation = 0.0;
    for (double t : terms) {
        const double next = sum + t;
        if (std::fabs(sum) >= std::fabs(t))
            compensation += (sum - next) + t;
        else
            compensation += (t - next) + sum;
        sum = next;
    }
    return std::fabs(sum + compensation);
}

struct SmallScenario {
    SyntheticScenario scenario;
    ResidualConfig config;
    SynthConfig synth;
    ObsCodeConfig signals;
};

SmallScenario make_scenario(double error_var, double error_mean = 0.0, uint64_t seed = 99) {
    SmallScenario s;
    s.synth.duration_s = 40.0;
    s.synth.n_gps = 24;
    s.synth.classes = {{EnvironmentClass::open_sky_rural, 40.0, 45.0, 1.0, error_mean,
                        error_var, false}};
    s.signals.codes = {{Constellation::gps, {"C1C"}}};
    s.config.clock_grouping = ClockGrouping::per_constellation_band;
    s.scenario = generate_scenario(s.synth, s.signals, s.config, seed);
    return s;
}

}  // namespace

TEST_CASE("receiver clock estimate is the median") {
    CHECK(estimate_receiver_clock({5.0, 5.0, 5.0}) == 5.0);
    CHECK(estimate_receiver_clock({5.0, 5.0, 5.0, 500.0}) == 5.0);
    CHECK_THROWS_AS((void)estimate_receiver_clock({}), Error);

    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> values;
        const size_t n = 1 + rng.next_below(40);
        for (size_t i = 0; i < n; ++i) values.push_back(rng.next_normal() * 10.0);
        CHECK(estimate_receiver_clock(values) ==
              doctest::Approx(oracles::sorted_middle_median(values)).epsilon(1e-15));
    }
}

TEST_CASE("zero-error scenario recovers epsilon below 1e-6 m") {
    SmallScenario s = make_scenario(0.0);
    size_t records = 0;
    for (const auto& epoch : s.scenario.epochs) {
        const EcefPosition truth = s.scenario.truth.interpolate(epoch.time);
        const EpochOutcome outcome =
            epoch_residuals(epoch, s.scenario.ephemerides, truth, s.scenario.iono, s.config);
        REQUIRE(outcome.residuals.has_value());
        for (const auto& rec : outcome.residuals->records) {
            CHECK(std::fabs(rec.epsilon_m) < 1e-6);
            ++records;
        }
    }
    CHECK(records > 200);
}

TEST_CASE("bookkeeping identity reconstructs every pseudorange to 1e-9 m") {
    SmallScenario s = make_scenario(7.7, 0.4);
    for (const auto& epoch : s.scenario.epochs) {
        const EcefPosition truth = s.scenario.truth.interpolate(epoch.time);
        const EpochOutcome outcome =
            epoch_residuals(epoch, s.scenario.ephemerides, truth, s.scenario.iono, s.config);
        REQUIRE(outcome.residuals.has_value());
        for (const auto& rec : outcome.residuals->records) CHECK(identity_defect(rec) < 1e-9);
    }
}

TEST_CASE("recovered epsilon matches injection up to the per-epoch common mode") {
    SmallScenario s = make_scenario(7.7, 0.4);

    // Injected errors per epoch for the common-mode (median) reference.
    std::map<double, std::vector<double>> injected_by_sow;
    std::map<std::pair<double, int>, double> injected_value;
    for (const auto& inj : s.scenario.injected) {
        injected_by_sow[inj.time.sow].push_back(inj.epsilon_m);
        injected_value[{inj.time.sow, inj.sat.prn}] = inj.epsilon_m;
    }

    for (const auto& epoch : s.scenario.epochs) {
        const EcefPosition truth = s.scenario.truth.interpolate(epoch.time);
        const EpochOutcome outcome =
            epoch_residuals(epoch, s.scenario.ephemerides, truth, s.scenario.iono, s.config);
        REQUIRE(outcome.residuals.has_value());
        const double common = oracles::sorted_middle_median(injected_by_sow.at(epoch.time.sow));
        for (const auto& rec : outcome.residuals->records) {
            const double expected = injected_value.at({epoch.time.sow, rec.sat.prn}) - common;
            CHECK(std::fabs(rec.epsilon_m - expected) < 1e-6);
        }
    }
}

TEST_CASE("identical bias on all satellites moves the clock, not epsilon") {
    SmallScenario s = make_scenario(3.0, 0.1);
    const ObservationEpoch& original = s.scenario.epochs.front();
    const EcefPosition truth = s.scenario.truth.interpolate(original.time);

    const EpochOutcome base =
        epoch_residuals(original, s.scenario.ephemerides, truth, s.scenario.iono, s.config);

    const double bias = 1024.0;  // c * dt, exactly representable next to ~2e7 m
    ObservationEpoch biased = original;
    for (auto& obs : biased.observations) obs.pseudorange_m += bias;
    const EpochOutcome shifted =
        epoch_residuals(biased, s.scenario.ephemerides, truth, s.scenario.iono, s.config);

    REQUIRE(base.residuals.has_value());
    REQUIRE(shifted.residuals.has_value());
    CHECK(std::fabs(shifted.residuals->rx_clock_m - base.residuals->rx_clock_m - bias) < 1e-9);
    REQUIRE(base.residuals->records.size() == shifted.residuals->records.size());
    for (size_t i = 0; i < base.residuals->records.size(); ++i) {
        CHECK(std::fabs(base.residuals->records[i].epsilon_m -
                        shifted.residuals->records[i].epsilon_m) < 1e-9);
    }
}

TEST_CASE("per-band processing equals joint processing when bands are grouped") {
    // Two bands with per-constellation-band clocks: epsilons must be identical
    // whether the bands are run in one epoch or in two single-band epochs.
    SmallScenario s = make_scenario(2.0, 0.0);
    s.signals.codes = {{Constellation::gps, {"C1C", "C5Q"}}};
    s.synth.duration_s = 5.0;
    s.scenario = generate_scenario(s.synth, s.signals, s.config, 7);

    const ObservationEpoch& joint = s.scenario.epochs.front();
    const EcefPosition truth = s.scenario.truth.interpolate(joint.time);

    ObservationEpoch only_l1 = joint, only_l5 = joint;
    only_l1.observations.clear();
    only_l5.observations.clear();
    for (const auto& obs : joint.observations)
        (obs.band_code == "C1C" ? only_l1 : only_l5).observations.push_back(obs);

    const auto joint_out =
        epoch_residuals(joint, s.scenario.ephemerides, truth, s.scenario.iono, s.config);
    const auto l1_out =
        epoch_residuals(only_l1, s.scenario.ephemerides, truth, s.scenario.iono, s.config);
    const auto l5_out =
        epoch_residuals(only_l5, s.scenario.ephemerides, truth, s.scenario.iono, s.config);

    REQUIRE(joint_out.residuals.has_value());
    std::map<std::pair<int, std::string>, double> joint_eps;
    for (const auto& rec : joint_out.residuals->records)
        joint_eps[{rec.sat.prn, rec.band_code}] = rec.epsilon_m;
    for (const auto& out : {l1_out, l5_out}) {
        REQUIRE(out.residuals.has_value());
        for (const auto& rec : out.residuals->records) {
            CHECK(joint_eps.at({rec.sat.prn, rec.band_code}) ==
                  doctest::Approx(rec.epsilon_m).epsilon(1e-15));
        }
    }
}

TEST_CASE("epoch with no usable satellite is skipped with a reason") {
    ObservationEpoch epoch;
    epoch.time = {2151, 216000.0};
    epoch.observations.push_back({{Constellation::gps, 31}, "C1C", 2.2e7, 40.0});

    EphemerisCollection empty;
    const EcefPosition truth = geodetic_to_ecef({0.76, 0.02, 120.0});
    const EpochOutcome outcome = epoch_residuals(epoch, empty, truth, std::nullopt,
                                                 ResidualConfig{.iono_policy = IonoPolicy::zero_if_absent});
    CHECK_FALSE(outcome.residuals.has_value());
    CHECK(outcome.skip == SkipReason::no_ephemeris);
}

TEST_CASE("missing iono with policy=require is an input error") {
    SmallScenario s = make_scenario(0.0);
    const ObservationEpoch& epoch = s.scenario.epochs.front();
    const EcefPosition truth = s.scenario.truth.interpolate(epoch.time);
    ResidualConfig strict = s.config;
    strict.iono_policy = IonoPolicy::require;
    CHECK_THROWS_AS(
        (void)epoch_residuals(epoch, s.scenario.ephemerides, truth, std::nullopt, strict), Error);

    ResidualConfig lenient = s.config;
    lenient.iono_policy = IonoPolicy::zero_if_absent;
    const EpochOutcome outcome =
        epoch_residuals(epoch, s.scenario.ephemerides, truth, std::nullopt, lenient);
    REQUIRE(outcome.residuals.has_value());
    for (const auto& rec : outcome.residuals->records) CHECK(rec.iono_m == 0.0);
}

TEST_CASE("outlier epsilon is retained and flagged") {
    SmallScenario s = make_scenario(0.0);
    ObservationEpoch epoch = s.scenario.epochs.front();
    const EcefPosition truth = s.scenario.truth.interpolate(epoch.time);
    epoch.observations.front().pseudorange_m += 5000.0;  // gross multipath-style fault

    const EpochOutcome outcome =
        epoch_residuals(epoch, s.scenario.ephemerides, truth, s.scenario.iono, s.config);
    REQUIRE(outcome.residuals.has_value());
    size_t outliers = 0;
    for (const auto& rec : outcome.residuals->records)
        if (rec.outlier) ++outliers;
    CHECK(outliers == 1);
    CHECK(outcome.residuals->records.size() == epoch.observations.size());
}

TEST_CASE("residual dataset carries labels and counts skips") {
    SmallScenario s = make_scenario(1.0);
    LabelTimeline timeline;
    timeline.intervals = {{s.scenario.epochs.front().time,
                           s.scenario.epochs.front().time.plus(15.0), EnvironmentClass::trees}};

    const AlignedJourney journey = align(s.scenario.epochs, s.scenario.truth, &timeline);
    const ResidualDataset dataset =
        residual_dataset(journey, s.scenario.ephemerides, s.scenario.iono, s.config);

    CHECK(dataset.epochs_processed + dataset.epochs_skipped == journey.epochs.size());
    CHECK(dataset.epochs_processed > 0);
    size_t labeled = 0, unlabeled = 0;
    for (const auto& rec : dataset.records) {
        if (rec.label == EnvironmentClass::trees) ++labeled;
        else if (!rec.label) ++unlabeled;
    }
    CHECK(labeled > 0);
    CHECK(unlabeled > 0);
    CHECK(labeled + unlabeled == dataset.records.size());
}

TEST_CASE("epoch with every satellite below the cutoff yields a skip, not records") {
    SmallScenario s = make_scenario(1.0);
    const ObservationEpoch& epoch = s.scenario.epochs.front();
    const EcefPosition truth = s.scenario.truth.interpolate(epoch.time);

    ResidualConfig sky_high = s.config;
    sky_high.elevation_cutoff_rad = 89.5 * cst::pi / 180.0;
    const EpochOutcome outcome =
        epoch_residuals(epoch, s.scenario.ephemerides, truth, s.scenario.iono, sky_high);
    CHECK_FALSE(outcome.residuals.has_value());
    CHECK(outcome.skip == SkipReason::no_satellite_above_cutoff);

    // Through the dataset map: 0 records, 1 skip for that epoch.
    AlignedJourney journey;
    journey.epochs.push_back({epoch, truth, std::nullopt});
    const ResidualDataset dataset =
        residual_dataset(journey, s.scenario.ephemerides, s.scenario.iono, sky_high);
    CHECK(dataset.records.empty());
    CHECK(dataset.epochs_skipped == 1);
    CHECK(dataset.epochs_processed == 0);
}

TEST_CASE("two valid epochs of n satellites give 2n records") {
    SmallScenario s = make_scenario(0.5);
    s.synth.duration_s = 2.0;
    s.scenario = generate_scenario(s.synth, s.signals, s.config, 5);
    REQUIRE(s.scenario.epochs.size() == 2);

    const AlignedJourney journey = align(s.scenario.epochs, s.scenario.truth, nullptr);
    const ResidualDataset dataset =
        residual_dataset(journey, s.scenario.ephemerides, s.scenario.iono, s.config);
    CHECK(dataset.records.size() == s.scenario.epochs[0].observations.size() +
                                        s.scenario.epochs[1].observations.size());
}
