#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "core/gnss_time.hpp"

namespace railenv {

enum class Constellation : int { gps = 0, galileo = 1 };

char constellation_letter(Constellation c);
std::string constellation_name(Constellation c);
std::optional<Constellation> constellation_from_letter(char letter);
std::optional<Constellation> constellation_from_name(const std::string& name);

struct SatelliteId {
    Constellation constellation = Constellation::gps;
    int prn = 0;

    friend auto operator<=>(const SatelliteId&, const SatelliteId&) = default;
};

/// "G05", "E12" style identifier.
std::string to_string(const SatelliteId& id);
std::optional<SatelliteId> parse_satellite_id(const std::string& text);

/// Carrier frequency for a RINEX 3 observation code such as "C1C" or "C5Q".
/// The middle digit selects the band; only code (pseudorange) observables are handled.
double carrier_frequency(Constellation c, const std::string& band_code);

/// One satellite/band observable pair at a single epoch.
struct SatSignalObservation {
    SatelliteId sat;
    std::string band_code;             // RINEX observation code, e.g. "C1C"
    double pseudorange_m = 0.0;
    std::optional<double> cn0_dbhz;    // absent means not reported, never zero
};

struct ObservationEpoch {
    GnssTime time;
    std::vector<SatSignalObservation> observations;
};

/// Keplerian broadcast ephemeris with clock polynomial, one navigation record.
struct BroadcastEphemeris {
    SatelliteId sat;
    GnssTime toe;      // ephemeris reference time
    GnssTime toc;      // clock reference time
    double sqrt_a = 0.0;     // m^0.5
    double ecc = 0.0;
    double i0 = 0.0;         // rad
    double omega0 = 0.0;     // rad
    double omega = 0.0;      // rad
    double m0 = 0.0;         // rad
    double delta_n = 0.0;    // rad/s
    double i_dot = 0.0;      // rad/s
    double omega_dot = 0.0;  // rad/s
    double cuc = 0.0, cus = 0.0;  // rad
    double crc = 0.0, crs = 0.0;  // m
    double cic = 0.0, cis = 0.0;  // rad
    double af0 = 0.0;        // s
    double af1 = 0.0;        // s/s
    double af2 = 0.0;        // s/s^2
    double tgd_s = 0.0;      // s, group delay for the L1-class band
    int health = 0;

    bool healthy() const { return health == 0; }

    /// Eccentricity and semi-major axis within the MEO broadcast envelope.
    bool plausible() const;
};

/// Klobuchar broadcast coefficients.
struct IonoParams {
    std::array<double, 4> alpha{};
    std::array<double, 4> beta{};
};

struct EcefPosition {
    double x = 0.0, y = 0.0, z = 0.0;

    friend EcefPosition operator-(const EcefPosition& a, const EcefPosition& b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    double norm() const;
};

double distance(const EcefPosition& a, const EcefPosition& b);

/// Time-sorted true receiver trajectory, linearly interpolated in ECEF.
struct GroundTruthTrack {
    enum class Interpolation { linear_ecef };

    struct Sample {
        GnssTime time;
        EcefPosition pos;
    };
    std::vector<Sample> samples;
    Interpolation mode = Interpolation::linear_ecef;

    bool covers(const GnssTime& t) const;
    EcefPosition interpolate(const GnssTime& t) const;  // requires covers(t)
};

// ---------------------------------------------------------------------------
// Environment taxonomy

/// Closed 13-class taxonomy with stable serialization codes.
enum class EnvironmentClass : int {
    trees = 0,
    buildings = 1,
    open_sky_urban = 2,
    open_sky_rural = 3,
    bridge = 4,
    post_bridge = 5,
    station = 6,
    triage = 7,
    tunnel = 8,
    post_tunnel = 9,
    mixed_trees_open_sky = 10,
    mixed_trees_buildings = 11,
    mixed_buildings_open_sky = 12,
};

inline constexpr int environment_class_count = 13;

/// Canonical serialized name, e.g. "OpenSkyRural".
const std::string& class_name(EnvironmentClass c);

/// Accepts canonical names plus the descriptive aliases used in label files
/// ("Open-sky (rural)", "Mixed trees and open-sky", ...). Case sensitive.
std::optional<EnvironmentClass> parse_class(const std::string& name);

/// True for the ten primary (non-mixed) classes.
bool is_clear(EnvironmentClass c);

std::vector<EnvironmentClass> all_classes();

struct LabelInterval {
    GnssTime start;
    GnssTime end;  // exclusive
    EnvironmentClass label;
};

/// Ordered, non-overlapping labeled intervals.
struct LabelTimeline {
    std::vector<LabelInterval> intervals;

    std::optional<EnvironmentClass> at(const GnssTime& t) const;
};

}  // namespace railenv
