#pragma once

#include <optional>
#include <vector>

#include "core/atmosphere.hpp"
#include "core/geodesy.hpp"
#include "core/ingest.hpp"
#include "core/types.hpp"

namespace railenv {

/// Per-satellite local error with every removed term retained for audit.
/// Bookkeeping identity:
///   pseudorange_m = geometric_range_m + rx_clock_m - sat_clock_m + tgd_m
///                   + tropo_m + iono_m + epsilon_m
struct ResidualRecord {
    GnssTime time;
    SatelliteId sat;
    std::string band_code;
    double epsilon_m = 0.0;
    bool outlier = false;  // |epsilon| >= 1 km, retained but flagged

    double pseudorange_m = 0.0;
    double geometric_range_m = 0.0;
    double rx_clock_m = 0.0;   // clock estimate applied to this record's group
    double sat_clock_m = 0.0;
    double tgd_m = 0.0;
    double tropo_m = 0.0;
    double iono_m = 0.0;
    double elevation_rad = 0.0;
    double azimuth_rad = 0.0;
    std::optional<double> cn0_dbhz;
    std::optional<EnvironmentClass> label;
};

struct EpochResiduals {
    GnssTime time;
    double rx_clock_m = 0.0;  // estimate of the first clock group, in group order
    std::vector<ResidualRecord> records;
    size_t satellite_count = 0;
};

enum class ClockGrouping {
    common,                   // one receiver clock per epoch
    per_constellation,
    per_constellation_band,   // default; absorbs inter-band receiver biases
};

enum class IonoPolicy {
    require,         // missing Klobuchar coefficients are an input error
    zero_if_absent,  // treat missing coefficients as zero delay
};

struct ResidualConfig {
    double elevation_cutoff_rad = 5.0 * 3.14159265358979323846 / 180.0;
    bool use_troposphere = true;
    IonoPolicy iono_policy = IonoPolicy::require;
    ClockGrouping clock_grouping = ClockGrouping::per_constellation_band;
    double outlier_threshold_m = 1000.0;
};

/// Median of the raw residuals; robust receiver clock estimate.
double estimate_receiver_clock(const std::vector<double>& raw_residuals_m);

/// Reason an epoch produced no residuals.
enum class SkipReason { no_satellite_above_cutoff, no_ephemeris, no_iono };

struct EpochOutcome {
    std::optional<EpochResiduals> residuals;  // empty when skipped
    std::optional<SkipReason> skip;
};

/// Remove geometric range, clocks, group delay and atmospheric terms from each
/// pseudorange of one epoch; the receiver clock is estimated per group as the
/// median of the raw residuals.
EpochOutcome epoch_residuals(const ObservationEpoch& epoch, const EphemerisCollection& ephemerides,
                             const EcefPosition& truth_position,
                             const std::optional<IonoParams>& iono, const ResidualConfig& config);

struct ResidualDataset {
    std::vector<ResidualRecord> records;
    size_t epochs_processed = 0;
    size_t epochs_skipped = 0;
};

/// Map epoch_residuals across an aligned journey, tagging records with the
/// epoch's environment label.
ResidualDataset residual_dataset(const AlignedJourney& journey,
                                 const EphemerisCollection& ephemerides,
                                 const std::optional<IonoParams>& iono,
                                 const ResidualConfig& config);

}  // namespace railenv
