#pragma once

#include <filesystem>
#include <string>

#include "core/types.hpp"

namespace testdata {

/// Plausible GPS LNAV record (week 2151, toe/toc 216000 = 2021-03-30 12:00).
railenv::BroadcastEphemeris gps_ephemeris();

/// RINEX 3.04 observation fixture: three 1 Hz epochs, GPS + Galileo,
/// C1C/S1C plus an unconfigured C2W column; G07 carries no C/N0.
std::string rinex_obs_fixture();

/// Same file with the second epoch's record list truncated.
std::string rinex_obs_truncated_fixture();

/// RINEX 3.04 navigation fixture: Klobuchar header, healthy G05/G07,
/// unhealthy G09, one Galileo record.
std::string rinex_nav_fixture();

std::string nav_version_line();

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const;
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

}  // namespace testdata
