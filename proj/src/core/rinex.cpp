#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

#include "core/errors.hpp"
#include "core/ingest.hpp"

// RINEX 3.0x observation and navigation parsing. Fixed-column format per the
// published RINEX 3.04 tables; only GPS and Galileo records are mapped, other
// systems are skipped and counted.

namespace railenv {

namespace {

std::string rtrim(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

std::string field(const std::string& line, size_t pos, size_t len) {
    if (pos >= line.size()) return {};
    return line.substr(pos, std::min(len, line.size() - pos));
}

bool is_blank(const std::string& s) {
    for (char c : s)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

/// Fortran-style float: blank means absent, 'D' exponents accepted.
std::optional<double> parse_rinex_float(const std::string& raw) {
    if (is_blank(raw)) return std::nullopt;
    std::string s = raw;
    for (char& c : s)
        if (c == 'D' || c == 'd') c = 'E';
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    return v;
}

struct HeaderLine {
    std::string content;
    std::string label;
};

HeaderLine split_header(const std::string& line) {
    return {field(line, 0, 60), rtrim(field(line, 60, 20))};
}

double check_version(const std::string& content, const std::string& path, size_t line_no,
                     char expected_type) {
    const auto ver = parse_rinex_float(field(content, 0, 9));
    if (!ver || *ver < 3.0 || *ver >= 4.0)
        throw_input(path + ":" + std::to_string(line_no) + ": unsupported RINEX version (need 3.x)");
    const char type = content.size() > 20 ? content[20] : ' ';
    if (type != expected_type)
        throw_input(path + ":" + std::to_string(line_no) + ": not a RINEX '" +
                    std::string(1, expected_type) + "' file");
    return *ver;
}

}  // namespace

// ---------------------------------------------------------------------------
// Observation files

ObsFile parse_rinex_obs(const std::string& path, const ObsCodeConfig& config) {
    std::ifstream in(path);
    if (!in) throw_input("cannot open " + path);

    ObsFile out;
    std::string line;
    size_t line_no = 0;

    // Header: collect per-system observation code layout.
    std::map<char, std::vector<std::string>> sys_codes;
    bool version_seen = false;
    bool header_done = false;
    char pending_sys = 0;
    size_t pending_count = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto [content, label] = split_header(line);
        if (label == "RINEX VERSION / TYPE") {
            check_version(content, path, line_no, 'O');
            version_seen = true;
        } else if (label == "SYS / # / OBS TYPES") {
            char sys = content.empty() ? ' ' : content[0];
            size_t offset = 7;
            if (sys == ' ') {  // continuation line
                sys = pending_sys;
            } else {
                const auto n = parse_rinex_float(field(content, 3, 3));
                if (!n) throw_input(path + ":" + std::to_string(line_no) + ": malformed obs types");
                pending_sys = sys;
                pending_count = static_cast<size_t>(*n);
                sys_codes[sys].clear();
            }
            for (size_t k = 0; k < 13 && sys_codes[sys].size() < pending_count; ++k) {
                const std::string code = rtrim(field(content, offset + 4 * k, 3));
                if (code.empty()) break;
                sys_codes[sys].push_back(code);
            }
        } else if (label == "END OF HEADER") {
            header_done = true;
            break;
        }
    }
    if (!version_seen) throw_input(path + ":1: missing RINEX VERSION / TYPE header");
    if (!header_done) throw_input(path + ": header missing END OF HEADER");

    // Track unsupported codes once per (system, code).
    for (const auto& [sys, codes] : sys_codes) {
        const auto constellation = constellation_from_letter(sys);
        for (const auto& code : codes) {
            if (code.empty() || code[0] != 'C') continue;  // only pseudorange codes matter here
            if (!constellation || !config.wants(*constellation, code))
                out.report.unsupported_codes[std::string(1, sys) + ":" + code] = 0;
        }
    }

    GnssTime last_time;
    bool have_last = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] != '>') continue;  // stray line between epochs

        int year, month, day, hour, minute, flag, nsat;
        double second;
        if (std::sscanf(line.c_str(), "> %d %d %d %d %d %lf %d %d", &year, &month, &day, &hour,
                        &minute, &second, &flag, &nsat) != 8) {
            out.report.warn(path + ":" + std::to_string(line_no) + ": malformed epoch header");
            ++out.report.epochs_skipped;
            continue;
        }
        if (flag > 1) {  // special event: nsat counts event records, not satellites
            for (int s = 0; s < nsat && std::getline(in, line); ++s) ++line_no;
            continue;
        }
        ++out.report.epochs_parsed;

        ObservationEpoch epoch;
        epoch.time = gnss_time_from_civil(year, month, day, hour, minute, second);

        bool body_ok = true;
        std::map<std::pair<SatelliteId, std::string>, bool> seen;
        for (int s = 0; s < nsat; ++s) {
            if (!std::getline(in, line)) {
                body_ok = false;
                break;
            }
            ++line_no;
            const auto sat = parse_satellite_id(field(line, 0, 3));
            if (!sat) {
                if (constellation_from_letter(line.empty() ? ' ' : line[0]) == std::nullopt)
                    continue;  // unsupported system, not an error
                out.report.warn(path + ":" + std::to_string(line_no) + ": malformed record");
                body_ok = false;
                break;
            }
            const auto codes_it = sys_codes.find(line[0]);
            if (codes_it == sys_codes.end()) continue;
            const auto& codes = codes_it->second;

            auto value_at = [&](size_t k) -> std::optional<double> {
                return parse_rinex_float(field(line, 3 + 16 * k, 14));
            };

            for (size_t k = 0; k < codes.size(); ++k) {
                const std::string& code = codes[k];
                if (code.empty() || code[0] != 'C') continue;
                if (!config.wants(sat->constellation, code)) {
                    if (value_at(k))
                        ++out.report.unsupported_codes[std::string(1, line[0]) + ":" + code];
                    continue;
                }
                const auto pr = value_at(k);
                if (!pr || *pr == 0.0) continue;
                if (*pr <= 1e6 || *pr >= 5e7) {
                    ++out.report.observations_skipped;
                    continue;
                }
                if (seen[{*sat, code}]) {
                    ++out.report.observations_skipped;
                    continue;
                }
                seen[{*sat, code}] = true;

                SatSignalObservation obs;
                obs.sat = *sat;
                obs.band_code = code;
                obs.pseudorange_m = *pr;

                // Matching C/N0 observable, e.g. S1C for C1C.
                const std::string snr_code = "S" + code.substr(1);
                for (size_t j = 0; j < codes.size(); ++j) {
                    if (codes[j] == snr_code) {
                        const auto cn0 = value_at(j);
                        if (cn0 && *cn0 > 0.0 && *cn0 <= 70.0) obs.cn0_dbhz = *cn0;
                        break;
                    }
                }
                epoch.observations.push_back(std::move(obs));
                ++out.report.observations_kept;
            }
        }

        if (!body_ok) {
            out.report.warn(path + ": epoch at " + to_string(epoch.time) + " truncated, skipped");
            ++out.report.epochs_skipped;
            continue;
        }
        if (epoch.observations.empty()) {
            ++out.report.epochs_skipped;
            continue;
        }
        if (have_last && !(last_time < epoch.time)) {
            out.report.warn(path + ": non-increasing epoch at " + to_string(epoch.time) +
                            ", skipped");
            ++out.report.epochs_skipped;
            continue;
        }
        last_time = epoch.time;
        have_last = true;
        out.epochs.push_back(std::move(epoch));
        ++out.report.epochs_emitted;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Navigation files

namespace {

/// One 19-char float field of a navigation record line, position 0..3.
std::optional<double> nav_field(const std::string& line, int slot) {
    return parse_rinex_float(field(line, 4 + 19 * static_cast<size_t>(slot), 19));
}

double nav_field_or0(const std::string& line, int slot) {
    return nav_field(line, slot).value_or(0.0);
}

}  // namespace

NavFile parse_rinex_nav(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_input("cannot open " + path);

    NavFile out;
    std::string line;
    size_t line_no = 0;

    bool version_seen = false;
    bool header_done = false;
    IonoParams iono{};
    bool have_alpha = false, have_beta = false;

    while (std::getline(in, line)) {
        ++line_no;
        const auto [content, label] = split_header(line);
        if (label == "RINEX VERSION / TYPE") {
            check_version(content, path, line_no, 'N');
            version_seen = true;
        } else if (label == "IONOSPHERIC CORR") {
            const std::string kind = rtrim(field(content, 0, 4));
            for (int k = 0; k < 4; ++k) {
                const auto v = parse_rinex_float(field(content, 5 + 12 * static_cast<size_t>(k), 12));
                if (!v) continue;
                if (kind == "GPSA") iono.alpha[static_cast<size_t>(k)] = *v;
                if (kind == "GPSB") iono.beta[static_cast<size_t>(k)] = *v;
            }
            if (kind == "GPSA") have_alpha = true;
            if (kind == "GPSB") have_beta = true;
        } else if (label == "END OF HEADER") {
            header_done = true;
            break;
        }
    }
    if (!version_seen) throw_input(path + ":1: missing RINEX VERSION / TYPE header");
    if (!header_done) throw_input(path + ": header missing END OF HEADER");
    if (have_alpha && have_beta) out.iono = iono;

    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto sat = parse_satellite_id(field(line, 0, 3));

        // Record length by system: GPS/Galileo use 7 continuation lines.
        if (!sat) {
            // Unsupported system: swallow its continuation lines.
            size_t skip = 7;
            const char sys = line[0];
            if (sys == 'R' || sys == 'S') skip = 3;
            for (size_t k = 0; k < skip && std::getline(in, line); ++k) ++line_no;
            ++out.report.observations_skipped;
            continue;
        }

        int year, month, day, hour, minute, second;
        if (std::sscanf(line.c_str() + 3, " %d %d %d %d %d %d", &year, &month, &day, &hour,
                        &minute, &second) != 6)
            throw_input(path + ":" + std::to_string(line_no) + ": malformed navigation epoch");

        BroadcastEphemeris eph;
        eph.sat = *sat;
        eph.toc = gnss_time_from_civil(year, month, day, hour, minute, second);
        eph.af0 = nav_field_or0(line, 1);
        eph.af1 = nav_field_or0(line, 2);
        eph.af2 = nav_field_or0(line, 3);

        std::string rec[7];
        for (auto& r : rec) {
            if (!std::getline(in, r))
                throw_input(path + ":" + std::to_string(line_no) + ": truncated navigation record");
            ++line_no;
        }

        eph.crs = nav_field_or0(rec[0], 1);
        eph.delta_n = nav_field_or0(rec[0], 2);
        eph.m0 = nav_field_or0(rec[0], 3);
        eph.cuc = nav_field_or0(rec[1], 0);
        eph.ecc = nav_field_or0(rec[1], 1);
        eph.cus = nav_field_or0(rec[1], 2);
        eph.sqrt_a = nav_field_or0(rec[1], 3);
        const double toe_sow = nav_field_or0(rec[2], 0);
        eph.cic = nav_field_or0(rec[2], 1);
        eph.omega0 = nav_field_or0(rec[2], 2);
        eph.cis = nav_field_or0(rec[2], 3);
        eph.i0 = nav_field_or0(rec[3], 0);
        eph.crc = nav_field_or0(rec[3], 1);
        eph.omega = nav_field_or0(rec[3], 2);
        eph.omega_dot = nav_field_or0(rec[3], 3);
        eph.i_dot = nav_field_or0(rec[4], 0);
        const double week = nav_field_or0(rec[4], 2);
        eph.toe = normalized(GnssTime{static_cast<int>(week), toe_sow});
        eph.health = static_cast<int>(nav_field_or0(rec[5], 1));
        // GPS: TGD; Galileo: BGD E5a/E1 occupies the same slot.
        eph.tgd_s = nav_field_or0(rec[5], 2);

        if (!eph.plausible()) {
            out.report.warn(path + ": record for " + to_string(eph.sat) +
                            " outside the broadcast envelope, skipped");
            ++out.report.observations_skipped;
            continue;
        }
        out.ephemerides.add(eph);
        ++out.report.observations_kept;
    }
    return out;
}

}  // namespace railenv
