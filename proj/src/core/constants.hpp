#pragma once

namespace railenv::constants {

inline constexpr double speed_of_light = 299792458.0;  // m/s

// WGS-84 ellipsoid and Earth rotation rate.
inline constexpr double earth_rotation_rate = 7.2921151467e-5;  // rad/s
inline constexpr double wgs84_a = 6378137.0;                    // m
inline constexpr double wgs84_f = 1.0 / 298.257223563;
inline constexpr double wgs84_e2 = wgs84_f * (2.0 - wgs84_f);

// Gravitational parameters as fixed by the respective interface specifications.
inline constexpr double gm_gps = 3.986005e14;        // m^3/s^2
inline constexpr double gm_galileo = 3.986004418e14; // m^3/s^2

// Relativistic clock correction factor F = -2*sqrt(GM)/c^2.
inline constexpr double relativistic_clock_factor = -4.442807633e-10;  // s/sqrt(m)

inline constexpr double seconds_per_week = 604800.0;
inline constexpr double seconds_per_day = 86400.0;

inline constexpr double freq_l1 = 1575.42e6;   // Hz, GPS L1 / Galileo E1
inline constexpr double freq_l2 = 1227.60e6;   // Hz, GPS L2
inline constexpr double freq_l5 = 1176.45e6;   // Hz, GPS L5 / Galileo E5a
inline constexpr double freq_e5b = 1207.14e6;  // Hz, Galileo E5b
inline constexpr double freq_e5ab = 1191.795e6; // Hz, Galileo E5 AltBOC

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double deg2rad = pi / 180.0;
inline constexpr double rad2deg = 180.0 / pi;

}  // namespace railenv::constants
