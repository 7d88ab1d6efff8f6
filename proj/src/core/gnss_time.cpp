#include "core/gnss_time.hpp"

#include <cmath>
#include <cstdio>

#include "core/constants.hpp"

namespace railenv {

namespace {

// Days from civil date, Howard Hinnant's algorithm. Valid for the Gregorian calendar.
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

const int64_t gps_epoch_days = days_from_civil(1980, 1, 6);

}  // namespace

double GnssTime::total_seconds() const {
    return static_cast<double>(week) * constants::seconds_per_week + sow;
}

GnssTime GnssTime::plus(double seconds) const {
    GnssTime t = *this;
    t.sow += seconds;
    return normalized(t);
}

double time_diff(const GnssTime& a, const GnssTime& b) {
    return static_cast<double>(a.week - b.week) * constants::seconds_per_week + (a.sow - b.sow);
}

double wrap_half_week(double dt) {
    if (dt > 0.5 * constants::seconds_per_week) dt -= constants::seconds_per_week;
    else if (dt < -0.5 * constants::seconds_per_week) dt += constants::seconds_per_week;
    return dt;
}

GnssTime gnss_time_from_civil(int year, int month, int day, int hour, int minute, double second) {
    const int64_t days = days_from_civil(year, month, day) - gps_epoch_days;
    GnssTime t;
    t.week = static_cast<int>(days / 7 - (days % 7 < 0 ? 1 : 0));
    const int64_t dow = days - static_cast<int64_t>(t.week) * 7;
    t.sow = static_cast<double>(dow) * constants::seconds_per_day +
            hour * 3600.0 + minute * 60.0 + second;
    return normalized(t);
}

GnssTime normalized(GnssTime t) {
    while (t.sow >= constants::seconds_per_week) {
        t.sow -= constants::seconds_per_week;
        ++t.week;
    }
    while (t.sow < 0.0) {
        t.sow += constants::seconds_per_week;
        --t.week;
    }
    return t;
}

std::string to_string(const GnssTime& t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "w%d:%.3f", t.week, t.sow);
    return buf;
}

}  // namespace railenv
