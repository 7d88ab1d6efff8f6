#pragma once

#include <cstdint>
#include <vector>

#include "core/config.hpp"
#include "core/errormodel.hpp"
#include "core/geodesy.hpp"
#include "core/types.hpp"

namespace railenv {

/// Forward-modeled journey. Every pseudorange is composed exactly as
///   R = rho + c*dt_rcv - c*dt_sat + tgd + tropo + iono + epsilon
/// with the same geodesy/atmosphere routines the extraction stage applies,
/// which makes the scenario the end-to-end oracle of the pipeline.
struct SyntheticScenario {
    std::vector<ObservationEpoch> epochs;
    GroundTruthTrack truth;
    LabelTimeline labels;
    EphemerisCollection ephemerides;
    IonoParams iono;

    /// Ground truth for model recovery. A per-epoch common shift of the
    /// injected errors is indistinguishable from the receiver clock, so the
    /// advertised per-class moments describe the observable part of the
    /// injection: epsilon minus its per-epoch clock-group median. Classical
    /// moments use direct two-pass formulas; the robust variance uses the
    /// toolkit estimator at the given h fraction.
    ErrorModelSet truth_models;

    struct InjectedError {
        GnssTime time;
        SatelliteId sat;
        std::string band_code;
        EnvironmentClass label;
        double epsilon_m;     // raw draw from the class generator
        double observable_m;  // after per-epoch common-mode removal
    };
    std::vector<InjectedError> injected;  // kept for verification
};

SyntheticScenario generate_scenario(const SynthConfig& synth, const ObsCodeConfig& signals,
                                    const ResidualConfig& residuals, uint64_t seed,
                                    double truth_h_fraction = 0.75);

/// Nominal Keplerian shell used by the scenario (exposed for geodesy tests).
std::vector<BroadcastEphemeris> nominal_constellation(Constellation constellation, size_t count,
                                                      const GnssTime& reference_time);

}  // namespace railenv
