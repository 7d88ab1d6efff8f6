#pragma once

#include <map>
#include <vector>

#include "core/types.hpp"

namespace railenv {

/// Satellite position and clock at a given emission time.
struct SatelliteState {
    EcefPosition position;          // ECEF at emission time, in the frame of that instant
    double clock_offset_s = 0.0;    // polynomial + relativistic term, TGD excluded
    double relativistic_term_s = 0.0;
};

/// Azimuth [0, 2pi) and elevation [-pi/2, pi/2] in the local East-North-Up frame.
struct AzEl {
    double azimuth_rad = 0.0;
    double elevation_rad = 0.0;
};

struct GeodeticPosition {
    double lat_rad = 0.0;
    double lon_rad = 0.0;
    double height_m = 0.0;
};

class EphemerisCollection {
  public:
    void add(const BroadcastEphemeris& eph) { records_[eph.sat].push_back(eph); }

    size_t size() const;
    bool empty() const { return records_.empty(); }

    const std::map<SatelliteId, std::vector<BroadcastEphemeris>>& by_satellite() const {
        return records_;
    }

    /// Healthy record minimizing |t - toe|, rejected beyond the 4 h validity window.
    const BroadcastEphemeris& select(const SatelliteId& sat, const GnssTime& t) const;

    bool has_valid(const SatelliteId& sat, const GnssTime& t) const;

  private:
    std::map<SatelliteId, std::vector<BroadcastEphemeris>> records_;
};

inline constexpr double ephemeris_validity_s = 4.0 * 3600.0;

/// Satellite position and clock from the broadcast Keplerian elements.
/// Kepler's equation is solved to |dE| < 1e-12 rad (numeric error after 30 steps).
SatelliteState satellite_state(const BroadcastEphemeris& eph, const GnssTime& emission_time);

struct RangeResult {
    double range_m = 0.0;        // geometric range with Earth-rotation correction
    SatelliteState sat_state;    // at the solved emission time
    AzEl azel;
    double sagnac_m = 0.0;       // |rotated - unrotated| range difference, for audit
};

/// Geometric range from a known receiver position at reception time.
/// Emission time is solved by fixed-point iteration t_tx = t_rx - rho/c to
/// |d rho| < 1e-4 m; the satellite position is rotated by omega_e * (travel time)
/// before ranging.
RangeResult geometric_range(const EcefPosition& receiver, const GnssTime& reception_time,
                            const BroadcastEphemeris& eph);

/// WGS-84 geodetic coordinates, iterative latitude to < 1e-11 rad.
GeodeticPosition ecef_to_geodetic(const EcefPosition& p);

EcefPosition geodetic_to_ecef(const GeodeticPosition& g);

/// Azimuth/elevation of `target` as seen from `origin`.
AzEl look_angles(const EcefPosition& origin, const EcefPosition& target);

/// Eccentric anomaly for mean anomaly m and eccentricity e (exposed for property tests).
double solve_kepler(double m, double e);

}  // namespace railenv
