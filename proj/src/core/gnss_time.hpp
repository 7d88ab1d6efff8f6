#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace railenv {

/// Continuous GNSS time as GPS week number plus seconds of week.
/// Galileo records are aligned to the same continuous week count.
struct GnssTime {
    int week = 0;
    double sow = 0.0;        // seconds of week, [0, 604800)
    int leap_seconds = 18;   // GPS-UTC offset carried for downstream consumers

    /// Seconds since the GPS epoch (1980-01-06 00:00:00).
    double total_seconds() const;

    GnssTime plus(double seconds) const;

    friend bool operator==(const GnssTime& a, const GnssTime& b) {
        return a.total_seconds() == b.total_seconds();
    }
    friend auto operator<=>(const GnssTime& a, const GnssTime& b) {
        return a.total_seconds() <=> b.total_seconds();
    }
};

/// a - b in seconds.
double time_diff(const GnssTime& a, const GnssTime& b);

/// Wrap a raw seconds-of-week difference into [-302400, 302400].
double wrap_half_week(double dt_seconds);

/// Civil date in the GPS time scale (no leap second handling) to GnssTime.
GnssTime gnss_time_from_civil(int year, int month, int day, int hour, int minute, double second);

GnssTime normalized(GnssTime t);

std::string to_string(const GnssTime& t);

}  // namespace railenv
