#include "core/atmosphere.hpp"

#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace railenv {

namespace cst = constants;

double klobuchar_delay(const IonoParams& iono, double lat_rad, double lon_rad, const AzEl& azel,
                       const GnssTime& time, double carrier_frequency_hz) {
    if (azel.elevation_rad < 0.0)
        throw_input("Klobuchar model requires non-negative elevation");

    // Semicircle units throughout, per the broadcast model definition.
    const double el_sc = azel.elevation_rad / cst::pi;
    const double lat_sc = lat_rad / cst::pi;
    const double lon_sc = lon_rad / cst::pi;

    // Earth-centred angle to the ionospheric pierce point.
    const double psi = 0.0137 / (el_sc + 0.11) - 0.022;

    double phi_i = lat_sc + psi * std::cos(azel.azimuth_rad);
    if (phi_i > 0.416) phi_i = 0.416;
    if (phi_i < -0.416) phi_i = -0.416;

    const double lam_i = lon_sc + psi * std::sin(azel.azimuth_rad) / std::cos(phi_i * cst::pi);
    const double phi_m = phi_i + 0.064 * std::cos((lam_i - 1.617) * cst::pi);

    // Local time at the pierce point, wrapped to one day.
    double t = cst::seconds_per_day / 2.0 * lam_i + std::fmod(time.sow, cst::seconds_per_day);
    t = std::fmod(t, cst::seconds_per_day);
    if (t < 0.0) t += cst::seconds_per_day;

    const double phi_m2 = phi_m * phi_m;
    const double phi_m3 = phi_m2 * phi_m;
    double amp = iono.alpha[0] + iono.alpha[1] * phi_m + iono.alpha[2] * phi_m2 +
                 iono.alpha[3] * phi_m3;
    if (amp < 0.0) amp = 0.0;
    double per = iono.beta[0] + iono.beta[1] * phi_m + iono.beta[2] * phi_m2 +
                 iono.beta[3] * phi_m3;
    if (per < 72000.0) per = 72000.0;

    const double x = 2.0 * cst::pi * (t - 50400.0) / per;
    const double obliquity = 1.0 + 16.0 * std::pow(0.53 - el_sc, 3.0);

    double delay_s;
    if (std::fabs(x) < 1.57) {
        const double x2 = x * x;
        delay_s = obliquity * (5.0e-9 + amp * (1.0 - x2 / 2.0 + x2 * x2 / 24.0));
    } else {
        delay_s = obliquity * 5.0e-9;  // night floor
    }

    const double scale = (cst::freq_l1 / carrier_frequency_hz) * (cst::freq_l1 / carrier_frequency_hz);
    return delay_s * cst::speed_of_light * scale;
}

double tropospheric_delay(const AzEl& azel, double height_m, double relative_humidity) {
    if (azel.elevation_rad <= tropo_min_elevation_rad)
        throw_numeric("tropospheric mapping undefined at elevation <= 2 deg");

    // Standard atmosphere at the given height.
    const double h = height_m > 0.0 ? height_m : 0.0;
    const double pressure_hpa = 1013.25 * std::pow(1.0 - 2.2557e-5 * h, 5.2568);
    const double temp_k = 288.15 - 6.5e-3 * h;
    const double e_hpa = relative_humidity * 6.108 *
                         std::exp((17.15 * temp_k - 4684.0) / (temp_k - 38.45));

    // Saastamoinen zenith total delay, then the 1/sin(el) mapping.
    const double zenith_m = 0.002277 * (pressure_hpa + (1255.0 / temp_k + 0.05) * e_hpa);
    return zenith_m / std::sin(azel.elevation_rad);
}

}  // namespace railenv
