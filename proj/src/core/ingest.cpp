#include "core/ingest.hpp"

#include <algorithm>
#include <cmath>

#include "core/csv_formats.hpp"
#include "core/errors.hpp"
#include "core/table_io.hpp"

namespace railenv {

// rinex.cpp
ObsFile parse_rinex_obs(const std::string& path, const ObsCodeConfig& config);
NavFile parse_rinex_nav(const std::string& path);

bool ObsCodeConfig::wants(Constellation c, const std::string& code) const {
    auto it = codes.find(c);
    if (it == codes.end()) return false;
    return std::find(it->second.begin(), it->second.end(), code) != it->second.end();
}

std::vector<std::pair<Constellation, std::string>> ObsCodeConfig::ordered() const {
    std::vector<std::pair<Constellation, std::string>> out;
    for (const auto& [c, list] : codes)
        for (const auto& code : list) out.emplace_back(c, code);
    return out;
}

void ParseReport::warn(std::string msg) { warnings.push_back(std::move(msg)); }

namespace {

bool looks_like_rinex(const std::string& path) {
    const std::string head = tableio::first_line(path);
    return head.find("RINEX VERSION / TYPE") != std::string::npos;
}

}  // namespace

ObsFile parse_obs(const std::string& path, const ObsCodeConfig& config) {
    return looks_like_rinex(path) ? parse_rinex_obs(path, config) : read_obs_csv(path, config);
}

NavFile parse_nav(const std::string& path) {
    return looks_like_rinex(path) ? parse_rinex_nav(path) : read_nav_csv(path);
}

// ---------------------------------------------------------------------------
// Toolkit CSV formats

void write_obs_csv(const std::string& path, const std::vector<ObservationEpoch>& epochs,
                   const std::vector<std::pair<std::string, std::string>>& comments) {
    tableio::CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    w.header(obs_csv_header);
    for (const auto& epoch : epochs) {
        for (const auto& obs : epoch.observations) {
            w.row({std::to_string(epoch.time.week), tableio::fmt(epoch.time.sow),
                   to_string(obs.sat), obs.band_code, tableio::fmt(obs.pseudorange_m),
                   obs.cn0_dbhz ? tableio::fmt(*obs.cn0_dbhz) : ""});
        }
    }
}

ObsFile read_obs_csv(const std::string& path, const ObsCodeConfig& config) {
    tableio::CsvReader r(path, obs_csv_header);
    ObsFile out;
    ObservationEpoch current;
    bool have_epoch = false;
    GnssTime last_time;
    bool have_last = false;

    auto flush = [&] {
        if (!have_epoch) return;
        ++out.report.epochs_parsed;
        if (current.observations.empty()) {
            ++out.report.epochs_skipped;
        } else if (have_last && !(last_time < current.time)) {
            out.report.warn(path + ": non-increasing epoch at " + to_string(current.time));
            ++out.report.epochs_skipped;
        } else {
            last_time = current.time;
            have_last = true;
            ++out.report.epochs_emitted;
            out.epochs.push_back(std::move(current));
        }
        current = {};
    };

    while (auto row = r.next_row()) {
        const auto& f = *row;
        const std::string ctx = path + ":" + std::to_string(r.line_number());
        GnssTime t{static_cast<int>(tableio::parse_long(f[0], ctx)),
                   tableio::parse_double(f[1], ctx)};
        const auto sat = parse_satellite_id(f[2]);
        if (!sat) throw_input(ctx + ": bad satellite id '" + f[2] + "'");

        if (!have_epoch || !(t == current.time)) {
            flush();
            current.time = t;
            have_epoch = true;
        }
        if (!config.wants(sat->constellation, f[3])) {
            ++out.report.unsupported_codes[std::string(1, constellation_letter(sat->constellation)) +
                                           ":" + f[3]];
            continue;
        }
        SatSignalObservation obs;
        obs.sat = *sat;
        obs.band_code = f[3];
        obs.pseudorange_m = tableio::parse_double(f[4], ctx);
        if (obs.pseudorange_m <= 1e6 || obs.pseudorange_m >= 5e7) {
            ++out.report.observations_skipped;
            continue;
        }
        if (!f[5].empty()) {
            const double cn0 = tableio::parse_double(f[5], ctx);
            if (cn0 > 0.0 && cn0 <= 70.0) obs.cn0_dbhz = cn0;  // out of range means absent
        }
        const bool dup = std::any_of(current.observations.begin(), current.observations.end(),
                                     [&](const SatSignalObservation& o) {
                                         return o.sat == obs.sat && o.band_code == obs.band_code;
                                     });
        if (dup) {
            ++out.report.observations_skipped;
            continue;
        }
        current.observations.push_back(std::move(obs));
        ++out.report.observations_kept;
    }
    flush();
    return out;
}

void write_nav_csv(const std::string& path, const EphemerisCollection& ephemerides,
                   const std::optional<IonoParams>& iono,
                   const std::vector<std::pair<std::string, std::string>>& comments) {
    tableio::CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    if (iono) {
        auto joined = [](const std::array<double, 4>& a) {
            return tableio::fmt(a[0]) + "," + tableio::fmt(a[1]) + "," + tableio::fmt(a[2]) + "," +
                   tableio::fmt(a[3]);
        };
        w.comment("klobuchar_alpha", joined(iono->alpha));
        w.comment("klobuchar_beta", joined(iono->beta));
    }
    w.header(nav_csv_header);
    for (const auto& [sat, records] : ephemerides.by_satellite()) {
        for (const auto& e : records) {
            w.row({to_string(e.sat), std::to_string(e.toe.week), tableio::fmt(e.toe.sow),
                   std::to_string(e.toc.week), tableio::fmt(e.toc.sow), tableio::fmt(e.sqrt_a),
                   tableio::fmt(e.ecc), tableio::fmt(e.i0), tableio::fmt(e.omega0),
                   tableio::fmt(e.omega), tableio::fmt(e.m0), tableio::fmt(e.delta_n),
                   tableio::fmt(e.i_dot), tableio::fmt(e.omega_dot), tableio::fmt(e.cuc),
                   tableio::fmt(e.cus), tableio::fmt(e.crc), tableio::fmt(e.crs),
                   tableio::fmt(e.cic), tableio::fmt(e.cis), tableio::fmt(e.af0),
                   tableio::fmt(e.af1), tableio::fmt(e.af2), tableio::fmt(e.tgd_s),
                   std::to_string(e.health)});
        }
    }
}

NavFile read_nav_csv(const std::string& path) {
    tableio::CsvReader r(path, nav_csv_header);
    NavFile out;

    IonoParams iono{};
    bool have_alpha = false, have_beta = false;
    for (const auto& [key, value] : r.comments()) {
        if (key != "klobuchar_alpha" && key != "klobuchar_beta") continue;
        const auto parts = tableio::split_csv(value);
        if (parts.size() != 4) throw_input(path + ": " + key + " needs 4 coefficients");
        std::array<double, 4> coef{};
        for (size_t i = 0; i < 4; ++i) coef[i] = tableio::parse_double(parts[i], key);
        if (key == "klobuchar_alpha") {
            iono.alpha = coef;
            have_alpha = true;
        } else {
            iono.beta = coef;
            have_beta = true;
        }
    }
    if (have_alpha && have_beta) out.iono = iono;

    while (auto row = r.next_row()) {
        const auto& f = *row;
        const std::string ctx = path + ":" + std::to_string(r.line_number());
        const auto sat = parse_satellite_id(f[0]);
        if (!sat) throw_input(ctx + ": bad satellite id '" + f[0] + "'");
        BroadcastEphemeris e;
        e.sat = *sat;
        e.toe = {static_cast<int>(tableio::parse_long(f[1], ctx)), tableio::parse_double(f[2], ctx)};
        e.toc = {static_cast<int>(tableio::parse_long(f[3], ctx)), tableio::parse_double(f[4], ctx)};
        e.sqrt_a = tableio::parse_double(f[5], ctx);
        e.ecc = tableio::parse_double(f[6], ctx);
        e.i0 = tableio::parse_double(f[7], ctx);
        e.omega0 = tableio::parse_double(f[8], ctx);
        e.omega = tableio::parse_double(f[9], ctx);
        e.m0 = tableio::parse_double(f[10], ctx);
        e.delta_n = tableio::parse_double(f[11], ctx);
        e.i_dot = tableio::parse_double(f[12], ctx);
        e.omega_dot = tableio::parse_double(f[13], ctx);
        e.cuc = tableio::parse_double(f[14], ctx);
        e.cus = tableio::parse_double(f[15], ctx);
        e.crc = tableio::parse_double(f[16], ctx);
        e.crs = tableio::parse_double(f[17], ctx);
        e.cic = tableio::parse_double(f[18], ctx);
        e.cis = tableio::parse_double(f[19], ctx);
        e.af0 = tableio::parse_double(f[20], ctx);
        e.af1 = tableio::parse_double(f[21], ctx);
        e.af2 = tableio::parse_double(f[22], ctx);
        e.tgd_s = tableio::parse_double(f[23], ctx);
        e.health = static_cast<int>(tableio::parse_long(f[24], ctx));
        if (!e.plausible()) {
            out.report.warn(ctx + ": record outside the broadcast envelope, skipped");
            ++out.report.observations_skipped;
            continue;
        }
        out.ephemerides.add(e);
        ++out.report.observations_kept;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ground truth and labels

GroundTruthTrack parse_ground_truth(const std::string& path) {
    tableio::CsvReader r(path, ground_truth_csv_header);
    GroundTruthTrack track;
    while (auto row = r.next_row()) {
        const auto& f = *row;
        const std::string ctx = path + ":" + std::to_string(r.line_number());
        GroundTruthTrack::Sample s;
        s.time = {static_cast<int>(tableio::parse_long(f[0], ctx)),
                  tableio::parse_double(f[1], ctx)};
        s.pos = {tableio::parse_double(f[2], ctx), tableio::parse_double(f[3], ctx),
                 tableio::parse_double(f[4], ctx)};
        if (!std::isfinite(s.pos.x) || !std::isfinite(s.pos.y) || !std::isfinite(s.pos.z)) {
            continue;  // non-finite coordinates rejected
        }
        if (!track.samples.empty() && !(track.samples.back().time < s.time))
            throw_input(ctx + ": time regression in ground truth");
        track.samples.push_back(s);
    }
    if (track.samples.size() < 2) throw_input(path + ": ground truth needs at least 2 samples");
    for (size_t i = 1; i < track.samples.size(); ++i) {
        const double dt = time_diff(track.samples[i].time, track.samples[i - 1].time);
        const double speed = distance(track.samples[i].pos, track.samples[i - 1].pos) / dt;
        if (speed >= 150.0)
            throw_input(path + ": implied speed " + std::to_string(speed) + " m/s at sample " +
                        std::to_string(i));
    }
    return track;
}

void write_ground_truth_csv(const std::string& path, const GroundTruthTrack& track,
                            const std::vector<std::pair<std::string, std::string>>& comments) {
    tableio::CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    w.header(ground_truth_csv_header);
    for (const auto& s : track.samples) {
        w.row({std::to_string(s.time.week), tableio::fmt(s.time.sow), tableio::fmt(s.pos.x),
               tableio::fmt(s.pos.y), tableio::fmt(s.pos.z)});
    }
}

LabelTimeline parse_labels(const std::string& path) {
    tableio::CsvReader r(path, labels_csv_header);
    LabelTimeline timeline;
    while (auto row = r.next_row()) {
        const auto& f = *row;
        const std::string ctx = path + ":" + std::to_string(r.line_number());
        LabelInterval iv;
        iv.start = {static_cast<int>(tableio::parse_long(f[0], ctx)),
                    tableio::parse_double(f[1], ctx)};
        iv.end = {static_cast<int>(tableio::parse_long(f[2], ctx)),
                  tableio::parse_double(f[3], ctx)};
        const auto label = parse_class(f[4]);
        if (!label) throw_input(ctx + ": unknown environment class '" + f[4] + "'");
        iv.label = *label;
        if (!(iv.start < iv.end)) throw_input(ctx + ": interval start must precede end");
        timeline.intervals.push_back(iv);
    }
    std::sort(timeline.intervals.begin(), timeline.intervals.end(),
              [](const LabelInterval& a, const LabelInterval& b) { return a.start < b.start; });
    for (size_t i = 1; i < timeline.intervals.size(); ++i) {
        if (timeline.intervals[i].start < timeline.intervals[i - 1].end)
            throw_input(path + ": overlapping intervals at " +
                        to_string(timeline.intervals[i].start));
    }
    return timeline;
}

void write_labels_csv(const std::string& path, const LabelTimeline& timeline,
                      const std::vector<std::pair<std::string, std::string>>& comments) {
    tableio::CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    w.header(labels_csv_header);
    for (const auto& iv : timeline.intervals) {
        w.row({std::to_string(iv.start.week), tableio::fmt(iv.start.sow),
               std::to_string(iv.end.week), tableio::fmt(iv.end.sow), class_name(iv.label)});
    }
}

// ---------------------------------------------------------------------------

AlignedJourney align(const std::vector<ObservationEpoch>& epochs, const GroundTruthTrack& track,
                     const LabelTimeline* timeline) {
    AlignedJourney out;
    for (const auto& epoch : epochs) {
        if (!track.covers(epoch.time)) {
            ++out.dropped_outside_track;
            continue;
        }
        AlignedEpoch a;
        a.epoch = epoch;
        a.truth_position = track.interpolate(epoch.time);
        if (timeline) a.label = timeline->at(epoch.time);
        out.epochs.push_back(std::move(a));
    }
    return out;
}

}  // namespace railenv
