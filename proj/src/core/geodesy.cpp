#include "core/geodesy.hpp"

#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace railenv {

namespace cst = constants;

size_t EphemerisCollection::size() const {
    size_t n = 0;
    for (const auto& [sat, recs] : records_) n += recs.size();
    return n;
}

const BroadcastEphemeris& EphemerisCollection::select(const SatelliteId& sat,
                                                      const GnssTime& t) const {
    auto it = records_.find(sat);
    if (it == records_.end() || it->second.empty())
        throw_input("no ephemeris for " + to_string(sat));
    const BroadcastEphemeris* best = nullptr;
    double best_dt = 0.0;
    for (const auto& eph : it->second) {
        if (!eph.healthy()) continue;
        const double dt = std::fabs(time_diff(t, eph.toe));
        if (dt > ephemeris_validity_s) continue;
        if (!best || dt < best_dt) {
            best = &eph;
            best_dt = dt;
        }
    }
    if (!best)
        throw_input("no ephemeris for " + to_string(sat) + " within validity at " + to_string(t));
    return *best;
}

bool EphemerisCollection::has_valid(const SatelliteId& sat, const GnssTime& t) const {
    auto it = records_.find(sat);
    if (it == records_.end()) return false;
    for (const auto& eph : it->second) {
        if (eph.healthy() && std::fabs(time_diff(t, eph.toe)) <= ephemeris_validity_s) return true;
    }
    return false;
}

double solve_kepler(double m, double e) {
    double ek = m;
    for (int i = 0; i < 30; ++i) {
        const double delta = (ek - e * std::sin(ek) - m) / (1.0 - e * std::cos(ek));
        ek -= delta;
        if (std::fabs(delta) < 1e-12) return ek;
    }
    throw_numeric("Kepler iteration did not converge (e=" + std::to_string(e) + ")");
}

SatelliteState satellite_state(const BroadcastEphemeris& eph, const GnssTime& t) {
    const double gm = eph.sat.constellation == Constellation::galileo ? cst::gm_galileo
                                                                      : cst::gm_gps;
    const double a = eph.sqrt_a * eph.sqrt_a;
    const double n0 = std::sqrt(gm / (a * a * a));
    const double n = n0 + eph.delta_n;

    const double tk = wrap_half_week(time_diff(t, eph.toe));
    const double mk = eph.m0 + n * tk;
    const double ek = solve_kepler(mk, eph.ecc);
    const double sin_ek = std::sin(ek);
    const double cos_ek = std::cos(ek);

    // True anomaly and argument of latitude.
    const double nu = std::atan2(std::sqrt(1.0 - eph.ecc * eph.ecc) * sin_ek, cos_ek - eph.ecc);
    const double phi = nu + eph.omega;
    const double sin_2phi = std::sin(2.0 * phi);
    const double cos_2phi = std::cos(2.0 * phi);

    // Harmonic corrections.
    const double du = eph.cus * sin_2phi + eph.cuc * cos_2phi;
    const double dr = eph.crs * sin_2phi + eph.crc * cos_2phi;
    const double di = eph.cis * sin_2phi + eph.cic * cos_2phi;

    const double u = phi + du;
    const double r = a * (1.0 - eph.ecc * cos_ek) + dr;
    const double inc = eph.i0 + di + eph.i_dot * tk;

    // Orbital plane position.
    const double xp = r * std::cos(u);
    const double yp = r * std::sin(u);

    // Longitude of ascending node in ECEF at time t.
    const double omega_k =
        eph.omega0 + (eph.omega_dot - cst::earth_rotation_rate) * tk -
        cst::earth_rotation_rate * eph.toe.sow;
    const double sin_ok = std::sin(omega_k);
    const double cos_ok = std::cos(omega_k);
    const double cos_i = std::cos(inc);

    SatelliteState state;
    state.position = {xp * cos_ok - yp * cos_i * sin_ok,
                      xp * sin_ok + yp * cos_i * cos_ok,
                      yp * std::sin(inc)};

    const double dtc = wrap_half_week(time_diff(t, eph.toc));
    state.relativistic_term_s = cst::relativistic_clock_factor * eph.ecc * eph.sqrt_a * sin_ek;
    state.clock_offset_s =
        eph.af0 + eph.af1 * dtc + eph.af2 * dtc * dtc + state.relativistic_term_s;
    return state;
}

namespace {

EcefPosition rotate_about_z(const EcefPosition& p, double angle_rad) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return {c * p.x + s * p.y, -s * p.x + c * p.y, p.z};
}

}  // namespace

RangeResult geometric_range(const EcefPosition& receiver, const GnssTime& reception_time,
                            const BroadcastEphemeris& eph) {
    double travel = 0.075;  // s, initial guess near the GPS shell
    double rho = 0.0;
    SatelliteState state;
    EcefPosition rotated;
    bool converged = false;
    for (int i = 0; i < 10; ++i) {
        const GnssTime t_tx = reception_time.plus(-travel);
        state = satellite_state(eph, t_tx);
        rotated = rotate_about_z(state.position, cst::earth_rotation_rate * travel);
        const double rho_new = distance(rotated, receiver);
        if (std::fabs(rho_new - rho) < 1e-4) {
            rho = rho_new;
            converged = true;
            break;
        }
        rho = rho_new;
        travel = rho / cst::speed_of_light;
    }
    if (!converged)
        throw_numeric("emission time iteration did not converge for " + to_string(eph.sat));

    RangeResult result;
    result.range_m = rho;
    result.sat_state = state;
    result.azel = look_angles(receiver, rotated);
    result.sagnac_m = std::fabs(rho - distance(state.position, receiver));
    return result;
}

GeodeticPosition ecef_to_geodetic(const EcefPosition& p) {
    const double norm = p.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw_input("cannot convert degenerate ECEF position");

    GeodeticPosition g;
    g.lon_rad = std::atan2(p.y, p.x);
    const double rho = std::hypot(p.x, p.y);
    if (rho < 1e-9) {  // on the rotation axis
        g.lat_rad = p.z >= 0.0 ? 0.5 * cst::pi : -0.5 * cst::pi;
        g.height_m = std::fabs(p.z) - cst::wgs84_a * std::sqrt(1.0 - cst::wgs84_e2);
        return g;
    }

    double lat = std::atan2(p.z, rho * (1.0 - cst::wgs84_e2));
    double nrad = cst::wgs84_a;
    for (int i = 0; i < 50; ++i) {
        const double sin_lat = std::sin(lat);
        nrad = cst::wgs84_a / std::sqrt(1.0 - cst::wgs84_e2 * sin_lat * sin_lat);
        const double next = std::atan2(p.z + cst::wgs84_e2 * nrad * sin_lat, rho);
        const double delta = std::fabs(next - lat);
        lat = next;
        if (delta < 1e-11) break;
    }
    g.lat_rad = lat;
    g.height_m = rho / std::cos(lat) - nrad;
    return g;
}

EcefPosition geodetic_to_ecef(const GeodeticPosition& g) {
    const double sin_lat = std::sin(g.lat_rad);
    const double cos_lat = std::cos(g.lat_rad);
    const double nrad = cst::wgs84_a / std::sqrt(1.0 - cst::wgs84_e2 * sin_lat * sin_lat);
    return {(nrad + g.height_m) * cos_lat * std::cos(g.lon_rad),
            (nrad + g.height_m) * cos_lat * std::sin(g.lon_rad),
            (nrad * (1.0 - cst::wgs84_e2) + g.height_m) * sin_lat};
}

AzEl look_angles(const EcefPosition& origin, const EcefPosition& target) {
    const GeodeticPosition g = ecef_to_geodetic(origin);
    const double sin_lat = std::sin(g.lat_rad), cos_lat = std::cos(g.lat_rad);
    const double sin_lon = std::sin(g.lon_rad), cos_lon = std::cos(g.lon_rad);

    const EcefPosition d = target - origin;
    const double east = -sin_lon * d.x + cos_lon * d.y;
    const double north = -sin_lat * cos_lon * d.x - sin_lat * sin_lon * d.y + cos_lat * d.z;
    const double up = cos_lat * cos_lon * d.x + cos_lat * sin_lon * d.y + sin_lat * d.z;

    AzEl azel;
    azel.elevation_rad = std::asin(up / d.norm());
    azel.azimuth_rad = std::atan2(east, north);
    if (azel.azimuth_rad < 0.0) azel.azimuth_rad += 2.0 * cst::pi;
    if (azel.azimuth_rad >= 2.0 * cst::pi) azel.azimuth_rad -= 2.0 * cst::pi;
    return azel;
}

}  // namespace railenv
