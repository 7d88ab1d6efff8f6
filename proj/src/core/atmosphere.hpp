#pragma once

#include "core/geodesy.hpp"
#include "core/types.hpp"

namespace railenv {

/// Ionospheric and tropospheric corrections applied to one observation.
struct AtmosphericDelays {
    double iono_m = 0.0;   // band-specific
    double tropo_m = 0.0;
};

/// Klobuchar single-frequency ionospheric delay in meters.
/// Evaluated for L1 then scaled by (f_L1/f)^2 for other carriers.
/// Requires elevation >= 0.
double klobuchar_delay(const IonoParams& iono, double lat_rad, double lon_rad, const AzEl& azel,
                       const GnssTime& time, double carrier_frequency_hz);

/// Saastamoinen zenith delay under the standard atmosphere at the given
/// height, mapped with 1/sin(elevation). Relative humidity defaults to the
/// dry atmosphere. Elevation must exceed 2 degrees.
double tropospheric_delay(const AzEl& azel, double height_m, double relative_humidity = 0.0);

inline constexpr double tropo_min_elevation_rad = 2.0 * 3.14159265358979323846 / 180.0;

}  // namespace railenv
