// CSV ingestion and emission for IMU, DVL and ground-truth series.
//
//   IMU   : t,fx,fy,fz,wx,wy,wz
//   DVL   : t,b1,b2,b3,b4
//   truth : t,vx,vy,vz
//
// Values are written in shortest round-trip form, so write -> read is exact.
#pragma once

#include <filesystem>
#include <utility>

#include "dvlfill/dataset.hpp"

namespace dvlfill {

ImuSeries read_imu_csv(const std::filesystem::path& path);
DvlSeries read_dvl_csv(const std::filesystem::path& path);
TruthSeries read_truth_csv(const std::filesystem::path& path);

std::pair<ImuSeries, DvlSeries> load_csv(const std::filesystem::path& imu_path,
                                         const std::filesystem::path& dvl_path);

void write_imu_csv(const std::filesystem::path& path, const ImuSeries& imu);
void write_dvl_csv(const std::filesystem::path& path, const DvlSeries& dvl);
void write_truth_csv(const std::filesystem::path& path, const TruthSeries& truth);

}  // namespace dvlfill
