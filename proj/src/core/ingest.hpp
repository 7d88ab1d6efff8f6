#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/geodesy.hpp"
#include "core/types.hpp"

namespace railenv {

/// Observation codes to extract, one per (constellation, band).
struct ObsCodeConfig {
    std::map<Constellation, std::vector<std::string>> codes = {
        {Constellation::gps, {"C1C"}},
        {Constellation::galileo, {"C1C"}},
    };

    bool wants(Constellation c, const std::string& code) const;
    std::vector<std::pair<Constellation, std::string>> ordered() const;
};

struct ParseReport {
    size_t epochs_parsed = 0;   // epoch headers seen
    size_t epochs_emitted = 0;
    size_t epochs_skipped = 0;
    size_t observations_kept = 0;
    size_t observations_skipped = 0;  // implausible values, duplicates
    std::map<std::string, size_t> unsupported_codes;
    std::vector<std::string> warnings;

    void warn(std::string msg);
};

struct ObsFile {
    std::vector<ObservationEpoch> epochs;
    ParseReport report;
};

struct NavFile {
    EphemerisCollection ephemerides;
    std::optional<IonoParams> iono;
    ParseReport report;
};

/// Parse an observation file. RINEX 3.x and the toolkit observation CSV are
/// both accepted; the format is sniffed from the first line.
ObsFile parse_obs(const std::string& path, const ObsCodeConfig& config);

/// Parse a navigation file (RINEX 3.x or toolkit ephemeris CSV).
NavFile parse_nav(const std::string& path);

/// Parse the ground-truth trajectory CSV
/// (`time_gps_week,time_gps_sow,ecef_x_m,ecef_y_m,ecef_z_m`).
GroundTruthTrack parse_ground_truth(const std::string& path);

/// Parse the environment-label CSV
/// (`start_week,start_sow,end_week,end_sow,class`).
LabelTimeline parse_labels(const std::string& path);

struct AlignedEpoch {
    ObservationEpoch epoch;
    EcefPosition truth_position;
    std::optional<EnvironmentClass> label;
};

struct AlignedJourney {
    std::vector<AlignedEpoch> epochs;
    size_t dropped_outside_track = 0;
};

/// Attach interpolated truth positions and interval labels to each epoch.
/// Epochs outside the track's time coverage are dropped and counted.
AlignedJourney align(const std::vector<ObservationEpoch>& epochs, const GroundTruthTrack& track,
                     const LabelTimeline* timeline = nullptr);

}  // namespace railenv
