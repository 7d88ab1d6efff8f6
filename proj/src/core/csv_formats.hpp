#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/ingest.hpp"
#include "core/types.hpp"

namespace railenv {

// Toolkit exchange formats. Synthetic journeys travel as these CSVs instead of
// synthesized RINEX; parse_obs/parse_nav accept them interchangeably.

inline constexpr const char* obs_csv_header = "week,sow,sat,band,pseudorange_m,cn0_dbhz";
inline constexpr const char* nav_csv_header =
    "sat,toe_week,toe_sow,toc_week,toc_sow,sqrt_a,ecc,i0,omega0,omega,m0,delta_n,i_dot,"
    "omega_dot,cuc,cus,crc,crs,cic,cis,af0,af1,af2,tgd_s,health";
inline constexpr const char* ground_truth_csv_header =
    "time_gps_week,time_gps_sow,ecef_x_m,ecef_y_m,ecef_z_m";
inline constexpr const char* labels_csv_header = "start_week,start_sow,end_week,end_sow,class";

void write_obs_csv(const std::string& path, const std::vector<ObservationEpoch>& epochs,
                   const std::vector<std::pair<std::string, std::string>>& comments = {});
ObsFile read_obs_csv(const std::string& path, const ObsCodeConfig& config);

void write_nav_csv(const std::string& path, const EphemerisCollection& ephemerides,
                   const std::optional<IonoParams>& iono,
                   const std::vector<std::pair<std::string, std::string>>& comments = {});
NavFile read_nav_csv(const std::string& path);

void write_ground_truth_csv(const std::string& path, const GroundTruthTrack& track,
                            const std::vector<std::pair<std::string, std::string>>& comments = {});

void write_labels_csv(const std::string& path, const LabelTimeline& timeline,
                      const std::vector<std::pair<std::string, std::string>>& comments = {});

}  // namespace railenv

#include "core/context.hpp"
#include "core/errormodel.hpp"
#include "core/residuals.hpp"

namespace railenv {

inline constexpr const char* residuals_csv_header =
    "week,sow,sat,band,epsilon_m,elev_rad,az_rad,cn0_dbhz,class";
inline constexpr const char* stream_csv_header = "week,sow,sat,band,class,error_m";
inline constexpr const char* unlabeled_token = "unlabeled";

void write_residuals_csv(const std::string& path, const std::vector<ResidualRecord>& records,
                         const std::vector<std::pair<std::string, std::string>>& comments = {});
std::vector<ResidualRecord> read_residuals_csv(const std::string& path);

struct FeatureTable {
    std::vector<std::string> names;
    std::vector<FeatureVector> vectors;
    std::vector<std::optional<EnvironmentClass>> labels;
};

void write_features_csv(const std::string& path, const FeatureTable& table,
                        const std::vector<std::pair<std::string, std::string>>& comments = {});
FeatureTable read_features_csv(const std::string& path);

void write_stream_csv(const std::string& path, const std::vector<SampledError>& stream,
                      const std::vector<std::pair<std::string, std::string>>& comments = {});

}  // namespace railenv
