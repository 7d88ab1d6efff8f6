#include "core/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace railenv {

char constellation_letter(Constellation c) {
    switch (c) {
        case Constellation::gps: return 'G';
        case Constellation::galileo: return 'E';
    }
    return '?';
}

std::string constellation_name(Constellation c) {
    switch (c) {
        case Constellation::gps: return "GPS";
        case Constellation::galileo: return "Galileo";
    }
    return "?";
}

std::optional<Constellation> constellation_from_letter(char letter) {
    switch (letter) {
        case 'G': return Constellation::gps;
        case 'E': return Constellation::galileo;
        default: return std::nullopt;
    }
}

std::optional<Constellation> constellation_from_name(const std::string& name) {
    if (name == "GPS") return Constellation::gps;
    if (name == "Galileo" || name == "GAL") return Constellation::galileo;
    return std::nullopt;
}

std::string to_string(const SatelliteId& id) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%c%02d", constellation_letter(id.constellation), id.prn);
    return buf;
}

std::optional<SatelliteId> parse_satellite_id(const std::string& text) {
    if (text.size() != 3) return std::nullopt;
    auto c = constellation_from_letter(text[0]);
    if (!c) return std::nullopt;
    if (!std::isdigit(static_cast<unsigned char>(text[1])) ||
        !std::isdigit(static_cast<unsigned char>(text[2])))
        return std::nullopt;
    const int prn = (text[1] - '0') * 10 + (text[2] - '0');
    if (prn < 1 || prn > 99) return std::nullopt;
    return SatelliteId{*c, prn};
}

double carrier_frequency(Constellation c, const std::string& band_code) {
    if (band_code.size() < 2)
        throw_input("invalid observation code '" + band_code + "'");
    const char band = band_code[1];
    if (c == Constellation::gps) {
        switch (band) {
            case '1': return constants::freq_l1;
            case '2': return constants::freq_l2;
            case '5': return constants::freq_l5;
        }
    } else if (c == Constellation::galileo) {
        switch (band) {
            case '1': return constants::freq_l1;
            case '5': return constants::freq_l5;
            case '7': return constants::freq_e5b;
            case '8': return constants::freq_e5ab;
        }
    }
    throw_input("no frequency known for " + constellation_name(c) + " code '" + band_code + "'");
}

bool BroadcastEphemeris::plausible() const {
    if (!(ecc >= 0.0 && ecc < 0.1)) return false;
    // sqrt(26.56e6) +- 10% spans GPS and Galileo MEO shells.
    const double nominal = 5153.6;
    return sqrt_a > 0.9 * nominal && sqrt_a < 1.1 * nominal;
}

double EcefPosition::norm() const { return std::sqrt(x * x + y * y + z * z); }

double distance(const EcefPosition& a, const EcefPosition& b) { return (a - b).norm(); }

bool GroundTruthTrack::covers(const GnssTime& t) const {
    if (samples.size() < 2) return false;
    return t >= samples.front().time && t <= samples.back().time;
}

EcefPosition GroundTruthTrack::interpolate(const GnssTime& t) const {
    if (!covers(t)) throw_input("truth track does not cover " + to_string(t));
    // First sample with time >= t.
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const Sample& s, const GnssTime& q) { return s.time < q; });
    if (it == samples.begin()) return it->pos;
    const Sample& hi = *it;
    const Sample& lo = *(it - 1);
    const double span = time_diff(hi.time, lo.time);
    const double f = span > 0.0 ? time_diff(t, lo.time) / span : 0.0;
    return {lo.pos.x + f * (hi.pos.x - lo.pos.x),
            lo.pos.y + f * (hi.pos.y - lo.pos.y),
            lo.pos.z + f * (hi.pos.z - lo.pos.z)};
}

namespace {

const std::array<std::string, environment_class_count> canonical_names = {
    "Trees",
    "Buildings",
    "OpenSkyUrban",
    "OpenSkyRural",
    "Bridge",
    "PostBridge",
    "Station",
    "Triage",
    "Tunnel",
    "PostTunnel",
    "MixedTreesOpenSky",
    "MixedTreesBuildings",
    "MixedBuildingsOpenSky",
};

const std::map<std::string, EnvironmentClass>& alias_table() {
    static const std::map<std::string, EnvironmentClass> table = [] {
        std::map<std::string, EnvironmentClass> m;
        for (int i = 0; i < environment_class_count; ++i)
            m[canonical_names[i]] = static_cast<EnvironmentClass>(i);
        m["Open-sky (urban)"] = EnvironmentClass::open_sky_urban;
        m["Open-sky (rural)"] = EnvironmentClass::open_sky_rural;
        m["Post-bridge"] = EnvironmentClass::post_bridge;
        m["Post-tunnel"] = EnvironmentClass::post_tunnel;
        m["Mixed trees and open-sky"] = EnvironmentClass::mixed_trees_open_sky;
        m["Mixed trees and buildings"] = EnvironmentClass::mixed_trees_buildings;
        m["Mixed buildings and open-sky"] = EnvironmentClass::mixed_buildings_open_sky;
        return m;
    }();
    return table;
}

}  // namespace

const std::string& class_name(EnvironmentClass c) {
    return canonical_names[static_cast<int>(c)];
}

std::optional<EnvironmentClass> parse_class(const std::string& name) {
    const auto& table = alias_table();
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool is_clear(EnvironmentClass c) {
    return static_cast<int>(c) < static_cast<int>(EnvironmentClass::mixed_trees_open_sky);
}

std::vector<EnvironmentClass> all_classes() {
    std::vector<EnvironmentClass> v;
    v.reserve(environment_class_count);
    for (int i = 0; i < environment_class_count; ++i) v.push_back(static_cast<EnvironmentClass>(i));
    return v;
}

std::optional<EnvironmentClass> LabelTimeline::at(const GnssTime& t) const {
    auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                               [](const GnssTime& q, const LabelInterval& iv) { return q < iv.start; });
    if (it == intervals.begin()) return std::nullopt;
    --it;
    if (t >= it->start && t < it->end) return it->label;
    return std::nullopt;
}

}  // namespace railenv
